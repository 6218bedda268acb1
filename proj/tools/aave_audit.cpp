// aave-audit: command-line driver for the dialect-bias audit pipeline.

#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "aaveaudit/pipeline.hpp"

namespace {

using aave::pipeline::RunConfig;
using Runner = std::function<void(const RunConfig&, std::ostream&)>;

int fail(const char* kind, const std::exception& e, int code) {
    std::cerr << "aave-audit: " << kind << ": " << e.what() << "\n";
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dialect-bias audit pipeline for emotion recognition systems"};
    app.set_config("--config", "", "TOML config file with the same keys as the long flags");
    app.require_subcommand(1);

    RunConfig cfg;
    std::string kappa = "binary";
    std::vector<std::string> features;

    app.add_option("--corpus", cfg.corpus, "Raw corpus (JSONL: id, text, optional lat/lon)");
    app.add_option("--annotations", cfg.annotations, "Human emotion annotations (JSONL, one record per post and annotator)");
    app.add_option("--predictions", cfg.predictions, "Predictions file(s) on the labelled sample (JSONL)");
    app.add_option("--full-predictions", cfg.full_predictions, "Predictions file(s) on the full corpus, for representativeness");
    app.add_option("--taxonomy", cfg.taxonomy, "Label-to-primary-emotion map (TSV)");
    app.add_option("--emoji", cfg.emoji, "Emoji descriptor table (TSV)");
    app.add_option("--lexicon", cfg.lexicon, "Word-emotion association lexicon (word<TAB>emotion<TAB>0|1)");
    app.add_option("--tracts", cfg.tracts, "Census tract polygons (GeoJSON)");
    app.add_option("--demographics", cfg.demographics, "Tract demographics (CSV keyed by GEOID)");
    app.add_option("--neighborhoods", cfg.neighborhoods, "Neighborhood to tract mapping (CSV)");
    app.add_option("--external-scores", cfg.external_scores, "Extra per-post feature scores (TSV: post_id, ext:feature, value)");
    app.add_option("--token-annotations", cfg.token_annotations, "Token annotations to import in place of the built-in tagger");
    app.add_option("--ddm-threshold", cfg.ddm_threshold, "DDM cut-off for the high stratum")->capture_default_str();
    app.add_option("--score-threshold", cfg.score_threshold, "Per-label score cut-off for predictions")->capture_default_str();
    app.add_option("--features", features, "Enabled dialect features (default: all built-in)");
    app.add_option("--seed", cfg.seed, "Seed for optional jitter")->capture_default_str();
    app.add_option("--jitter", cfg.jitter, "Regression design jitter scale (0 disables)")->capture_default_str();
    app.add_option("--min-posts", cfg.min_posts, "Minimum posts per neighborhood")->capture_default_str();
    app.add_option("--kappa", kappa, "Kappa mode: binary, linear or quadratic")
        ->check(CLI::IsMember({"binary", "linear", "quadratic"}))
        ->capture_default_str();
    app.add_option("--out", cfg.out_dir, "Output directory")->envname("AAVE_AUDIT_OUT")->capture_default_str();
    app.add_flag("--strict", cfg.strict, "Treat every diagnostic as a failure");

    const std::vector<std::pair<std::string, std::pair<std::string, Runner>>> stages{
        {"clean", {"Clean and filter the raw corpus", aave::pipeline::run_clean}},
        {"annotate", {"Tokenize and tag cleaned posts", aave::pipeline::run_annotate}},
        {"ddm", {"Detect dialect features and score DDM", aave::pipeline::run_ddm}},
        {"silver", {"Aggregate annotations into silver labels", aave::pipeline::run_silver}},
        {"audit", {"Confusion, disparity and representativeness tables", aave::pipeline::run_audit}},
        {"agree", {"Pairwise agreement and group ANOVA", aave::pipeline::run_agree}},
        {"regress", {"Per-rater feature regressions", aave::pipeline::run_regress}},
        {"geo", {"Tract joins and neighborhood correlations", aave::pipeline::run_geo}},
        {"report", {"Bundle tables and render charts", aave::pipeline::run_report}},
        {"all", {"Run every stage whose inputs are given", aave::pipeline::run_all}},
    };
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, spec] : stages) {
        auto* sub = app.add_subcommand(name, spec.first)->fallthrough();
        subs[name] = sub;
    }
    subs["ddm"]->add_option("--threshold", cfg.ddm_threshold, "Alias for --ddm-threshold");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (!features.empty()) cfg.features = {features.begin(), features.end()};
    cfg.kappa_mode = kappa == "linear"      ? aave::KappaMode::ordinal_linear
                     : kappa == "quadratic" ? aave::KappaMode::ordinal_quadratic
                                            : aave::KappaMode::binary;

    try {
        cfg.validate();
        for (const auto& [name, spec] : stages)
            if (subs[name]->parsed()) spec.second(cfg, std::cout);
    } catch (const aave::IoError& e) {
        return fail("io error", e, 2);
    } catch (const aave::Error& e) {
        return fail("error", e, 1);
    } catch (const nlohmann::json::exception& e) {
        return fail("error", e, 1);
    } catch (const std::filesystem::filesystem_error& e) {
        return fail("io error", e, 2);
    }
    return 0;
}
