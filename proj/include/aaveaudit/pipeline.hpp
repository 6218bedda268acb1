#pragma once

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "annotate.hpp"
#include "audit.hpp"
#include "corpus.hpp"
#include "ddm.hpp"
#include "emoji.hpp"
#include "features.hpp"
#include "geo.hpp"
#include "labels.hpp"
#include "report/svg.hpp"
#include "taxonomy.hpp"
#include "util/hash.hpp"
#include "util/io.hpp"
#include "util/text.hpp"

namespace aave::pipeline {

namespace fs = std::filesystem;

inline fs::path default_data_dir() {
#ifdef AAVE_AUDIT_DATA_DIR
    return AAVE_AUDIT_DATA_DIR;
#else
    return "data";
#endif
}

struct RunConfig {
    fs::path corpus;
    fs::path annotations;
    std::vector<fs::path> predictions;
    std::vector<fs::path> full_predictions;
    fs::path taxonomy = default_data_dir() / "taxonomy_default.tsv";
    fs::path emoji = default_data_dir() / "emoji_descriptors.tsv";
    fs::path lexicon;
    fs::path tracts;
    fs::path demographics;
    fs::path neighborhoods;
    fs::path external_scores;
    fs::path token_annotations;
    double ddm_threshold = kDefaultDdmThreshold;
    double score_threshold = kDefaultScoreThreshold;
    std::set<std::string> features = all_builtin_features();
    unsigned long long seed = 0;
    double jitter = 0.0;
    std::size_t min_posts = geo::kDefaultMinPosts;
    KappaMode kappa_mode = KappaMode::binary;
    fs::path out_dir = "aave-audit-out";
    bool strict = false;

    void validate() const {
        if (ddm_threshold < 0.0 || ddm_threshold > 1.0) throw ValidationError("ddm threshold must lie in [0,1]");
        if (score_threshold < 0.0 || score_threshold > 1.0) throw ValidationError("score threshold must lie in [0,1]");
        if (jitter < 0.0) throw ValidationError("jitter must be non-negative");
        if (features.empty()) throw ValidationError("no features enabled");
        for (const auto& f : features)
            if (!is_builtin_feature(f)) throw ValidationError("unknown feature '" + f + "'");
        const auto check = [](const fs::path& p, const char* what) {
            if (!p.empty() && !fs::exists(p)) throw IoError(std::string(what) + " not found: " + p.string());
        };
        check(corpus, "corpus");
        check(annotations, "annotations");
        for (const auto& p : predictions) check(p, "predictions");
        for (const auto& p : full_predictions) check(p, "full predictions");
        check(taxonomy, "taxonomy");
        check(emoji, "emoji table");
        check(lexicon, "lexicon");
        check(tracts, "tracts");
        check(demographics, "demographics");
        check(neighborhoods, "neighborhoods");
        check(external_scores, "external scores");
        check(token_annotations, "token annotations");
    }

    /// Hash over settings and input contents; independent of where files live
    /// and of the output directory.
    std::string hash() const {
        Fnv1a h;
        const auto field = [&](const std::string& k, const std::string& v) { h.update(k).update("=").update(v).update(";"); };
        const auto file = [&](const std::string& k, const fs::path& p) { field(k, p.empty() ? "-" : hash_file(p.string())); };
        file("corpus", corpus);
        file("annotations", annotations);
        for (const auto& p : predictions) file("predictions", p);
        for (const auto& p : full_predictions) file("full_predictions", p);
        file("taxonomy", taxonomy);
        file("emoji", emoji);
        file("lexicon", lexicon);
        file("tracts", tracts);
        file("demographics", demographics);
        file("neighborhoods", neighborhoods);
        file("external_scores", external_scores);
        file("token_annotations", token_annotations);
        field("ddm_threshold", text::fmt_double(ddm_threshold));
        field("score_threshold", text::fmt_double(score_threshold));
        field("features", text::join({features.begin(), features.end()}, ","));
        field("seed", std::to_string(seed));
        field("jitter", text::fmt_double(jitter));
        field("min_posts", std::to_string(min_posts));
        field("kappa_mode", std::to_string(static_cast<int>(kappa_mode)));
        field("tagger", std::string(kTaggerVersion));
        return h.hex();
    }
};

/// Output file names, and the stage that produces each.
namespace artifact {
inline constexpr const char* clean = "clean.jsonl";
inline constexpr const char* rejects = "rejects.jsonl";
inline constexpr const char* annotated = "annotated.tsv";
inline constexpr const char* features = "features.jsonl";
inline constexpr const char* ddm = "ddm.jsonl";
inline constexpr const char* ddm_stats = "ddm_stats.json";
inline constexpr const char* silver = "silver.jsonl";
inline constexpr const char* silver_summary = "silver_summary.json";
inline constexpr const char* nrc_predictions = "nrc_predictions.jsonl";
inline constexpr const char* confusion = "confusion.csv";
inline constexpr const char* disparity = "disparity.csv";
inline constexpr const char* representativeness = "representativeness.csv";
inline constexpr const char* agreement = "agreement.csv";
inline constexpr const char* agreement_pairs = "agreement_pairs.csv";
inline constexpr const char* anova = "anova.csv";
inline constexpr const char* regression = "regression.csv";
inline constexpr const char* regression_fit = "regression_fit.csv";
inline constexpr const char* influence = "influence.csv";
inline constexpr const char* geo_joins = "geo_joins.csv";
inline constexpr const char* neighborhoods = "neighborhoods.csv";
inline constexpr const char* neighborhood_probs = "neighborhood_probs.csv";
inline constexpr const char* geo_correlations = "geo_correlations.csv";
inline constexpr const char* ddm_demographic = "ddm_demographic.csv";
inline constexpr const char* report = "report.json";
} // namespace artifact

/// Collects diagnostics for one stage; `--strict` turns any of them into a failure.
class Stage {
public:
    Stage(const RunConfig& cfg, std::string name) : cfg_(cfg), name_(std::move(name)) {}

    void note(const std::string& msg) { diagnostics_.push_back(msg); }
    void note(const Diagnostic& d, const std::string& origin) { diagnostics_.push_back(origin + ": " + d.str()); }

    fs::path out(const std::string& file) const { return cfg_.out_dir / file; }

    /// Path of an upstream artifact; names the producing subcommand when missing.
    fs::path upstream(const std::string& file, const std::string& producer) const {
        const auto p = out(file);
        if (!fs::exists(p)) throw IoError("missing " + p.string() + " (run `" + producer + "` first)");
        return p;
    }

    void finish(std::ostream& log) const {
        const auto path = out(name_ + "_diagnostics.txt");
        std::string body;
        for (const auto& d : diagnostics_) body += d + "\n";
        io::write_file(path, body);
        for (const auto& d : diagnostics_) log << "[" << name_ << "] " << d << "\n";
        if (cfg_.strict && !diagnostics_.empty())
            throw ValidationError(name_ + ": " + std::to_string(diagnostics_.size()) + " diagnostic(s) under --strict");
    }

    const std::vector<std::string>& diagnostics() const { return diagnostics_; }

private:
    const RunConfig& cfg_;
    std::string name_;
    std::vector<std::string> diagnostics_;
};

inline std::string provenance(const RunConfig& cfg) {
    std::string corpus_hash = "-";
    if (!cfg.corpus.empty()) corpus_hash = hash_file(cfg.corpus.string());
    return "config_hash=" + cfg.hash() + " corpus_hash=" + corpus_hash + " taxonomy_hash=" + hash_file(cfg.taxonomy.string()) +
           " tagger=" + std::string(kTaggerVersion) + " ddm_threshold=" + text::fmt_double(cfg.ddm_threshold) +
           " score_threshold=" + text::fmt_double(cfg.score_threshold);
}

inline std::string fmt(double v) { return text::fmt_fixed(v, 6); }
inline std::string fmt(const Quotient& q) { return q.defined() ? fmt(*q.value()) : "NA"; }

inline std::string jsonl(const std::vector<nlohmann::json>& rows) {
    std::string out;
    for (const auto& r : rows) out += r.dump() + "\n";
    return out;
}

inline void write_table(const Stage& st, const std::string& file, const io::CsvTable& table) {
    io::write_file(st.out(file), table.str());
}

// ---------------------------------------------------------------------------
// Stages

inline void run_clean(const RunConfig& cfg, std::ostream& log) {
    if (cfg.corpus.empty()) throw ValidationError("clean needs --corpus");
    Stage st(cfg, "clean");
    const auto emoji = EmojiTable::load(cfg.emoji);
    CleanConfig cc;
    cc.emoji = &emoji;
    auto load = load_corpus(cfg.corpus);
    for (const auto& d : load.diagnostics) st.note(d, cfg.corpus.string());
    // Every downstream artifact inherits this order.
    std::sort(load.posts.begin(), load.posts.end(), [](const RawPost& a, const RawPost& b) { return a.id < b.id; });
    std::vector<nlohmann::json> kept, rejected;
    for (const auto& post : load.posts) {
        try {
            const auto r = clean(post, cc);
            if (const auto* c = std::get_if<CleanPost>(&r)) kept.push_back(to_json(*c));
            else rejected.push_back(to_json(std::get<Rejected>(r)));
        } catch (const DecodeError& e) {
            st.note("post '" + post.id + "': " + e.what());
        }
    }
    io::write_file(st.out(artifact::clean), jsonl(kept));
    io::write_file(st.out(artifact::rejects), jsonl(rejected));
    log << "clean: " << kept.size() << " kept, " << rejected.size() << " rejected\n";
    st.finish(log);
}

inline void run_annotate(const RunConfig& cfg, std::ostream& log) {
    Stage st(cfg, "annotate");
    const auto corpus = load_clean_corpus(st.upstream(artifact::clean, "clean"));
    std::map<std::string, AnnotatedDoc> imported;
    if (!cfg.token_annotations.empty()) {
        auto imp = import_annotations(cfg.token_annotations, corpus);
        for (const auto& d : imp.diagnostics) st.note(d, cfg.token_annotations.string());
        imported = std::move(imp.docs);
    }
    std::vector<AnnotatedDoc> docs;
    docs.reserve(corpus.size());
    for (const auto& p : corpus) {
        const auto it = imported.find(p.id);
        docs.push_back(it != imported.end() ? it->second : annotate(p));
    }
    io::write_file(st.out(artifact::annotated), export_annotations(docs));
    log << "annotate: " << docs.size() << " docs (" << imported.size() << " imported)\n";
    st.finish(log);
}

inline std::vector<AnnotatedDoc> load_annotated(const Stage& st) {
    const auto path = st.upstream(artifact::annotated, "annotate");
    return parse_annotation_blocks(io::read_lines(path), path.string());
}

inline void run_ddm(const RunConfig& cfg, std::ostream& log) {
    Stage st(cfg, "ddm");
    const auto docs = load_annotated(st);
    if (docs.empty()) throw ValidationError("ddm: no annotated posts");
    ExternalScores external;
    std::set<std::string> ext_features;
    if (!cfg.external_scores.empty()) {
        std::set<std::string> ids;
        for (const auto& d : docs) ids.insert(d.post_id);
        external = import_external_scores(cfg.external_scores, &ids);
        ext_features = external_feature_names(external);
    }
    std::vector<FeatureVector> vectors;
    std::vector<DensityRow> rows;
    std::vector<nlohmann::json> feature_lines;
    for (const auto& doc : docs) {
        auto fv = detect_all(doc, cfg.features);
        rows.push_back(densities(fv, external, ext_features));
        nlohmann::json j{{"post_id", fv.post_id}, {"token_count", fv.token_count}, {"counts", fv.counts}};
        if (!ext_features.empty()) j["external"] = external[fv.post_id];
        feature_lines.push_back(std::move(j));
        vectors.push_back(std::move(fv));
    }
    const auto stats = fit_normalizer(rows);
    std::vector<nlohmann::json> score_lines;
    std::size_t high = 0;
    for (const auto& row : rows) {
        const auto s = score(row, stats, cfg.ddm_threshold);
        high += s.stratum == Stratum::high;
        score_lines.push_back(to_json(s));
    }
    std::set<std::string> enabled = cfg.features;
    enabled.insert(ext_features.begin(), ext_features.end());
    nlohmann::json sidecar{{"normalization", to_json(stats)},
                           {"enabled_features", enabled},
                           {"threshold", cfg.ddm_threshold},
                           {"tagger_version", std::string(kTaggerVersion)},
                           {"provenance", provenance(cfg)}};
    io::write_file(st.out(artifact::features), jsonl(feature_lines));
    io::write_file(st.out(artifact::ddm), jsonl(score_lines));
    io::write_file(st.out(artifact::ddm_stats), sidecar.dump(2) + "\n");
    log << "ddm: " << rows.size() << " posts scored, " << high << " high-stratum\n";
    st.finish(log);
}

inline std::vector<Annotation> require_annotations(const RunConfig& cfg, const char* stage) {
    if (cfg.annotations.empty()) throw ValidationError(std::string(stage) + " needs --annotations");
    return load_annotations(cfg.annotations);
}

inline void run_silver(const RunConfig& cfg, std::ostream& log) {
    Stage st(cfg, "silver");
    const auto annotations = require_annotations(cfg, "silver");
    const auto scores = load_ddm_scores(st.upstream(artifact::ddm, "ddm"));
    const auto result = silver(annotations, scores);
    std::vector<nlohmann::json> lines;
    for (const auto& l : result.labels) lines.push_back(to_json(l));
    for (const auto& p : result.excluded_no_ingroup) st.note("post '" + p + "': high stratum without ingroup ratings; excluded");
    for (const auto& p : result.excluded_no_score) st.note("post '" + p + "': annotated but not scored; excluded");
    nlohmann::json summary{
        {"labels", result.labels.size()},
        {"excluded_no_ingroup", result.excluded_no_ingroup},
        {"excluded_no_score", result.excluded_no_score},
        {"extreme_disagreement_before_gating",
         {{"posts", result.extreme_before_gating.posts}, {"markers", result.extreme_before_gating.markers}}},
        {"extreme_disagreement_after_gating",
         {{"posts", result.extreme_after_gating.posts}, {"markers", result.extreme_after_gating.markers}}},
        {"provenance", provenance(cfg)}};
    io::write_file(st.out(artifact::silver), jsonl(lines));
    io::write_file(st.out(artifact::silver_summary), summary.dump(2) + "\n");
    log << "silver: " << result.labels.size() << " labels\n";
    st.finish(log);
}

/// Loads every predictions file plus, when a lexicon is configured, the
/// lexicon baseline scored over the annotated corpus.
inline std::vector<Prediction> gather_predictions(const RunConfig& cfg, Stage& st, const TaxonomyMap& tax,
                                                  const std::vector<fs::path>& files, bool include_lexicon) {
    std::vector<Prediction> preds;
    for (const auto& f : files) {
        auto p = load_predictions(f, &tax);
        preds.insert(preds.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
    }
    if (include_lexicon && !cfg.lexicon.empty()) {
        const auto lexicon = NrcLexicon::load(cfg.lexicon);
        std::vector<nlohmann::json> lines;
        for (const auto& doc : load_annotated(st)) {
            auto p = nrc_score(doc, lexicon, tax);
            lines.push_back(to_json(p));
            preds.push_back(std::move(p));
        }
        io::write_file(st.out(artifact::nrc_predictions), jsonl(lines));
    }
    return preds;
}

inline void run_audit(const RunConfig& cfg, std::ostream& log) {
    Stage st(cfg, "audit");
    const auto tax = load_taxonomy(cfg.taxonomy);
    const auto silver_labels = load_silver(st.upstream(artifact::silver, "silver"));
    const auto preds = gather_predictions(cfg, st, tax, cfg.predictions, true);
    if (preds.empty()) throw ValidationError("audit needs --predictions or --lexicon");
    const auto index = index_predictions(preds, cfg.score_threshold);
    const auto prov = provenance(cfg);

    io::CsvTable conf(prov, {"system", "emotion", "stratum", "tp", "fp", "tn", "fn", "precision", "recall", "f1", "refusals"});
    nlohmann::json audit_json{{"provenance", prov}};
    for (const auto& [system, sys] : index) {
        std::size_t refusals = 0;
        for (const auto& [post, labels] : sys) refusals += !labels;
        for (StratumFilter f : {StratumFilter::all, StratumFilter::high, StratumFilter::low}) {
            const auto counts = confusion(sys, silver_labels, f);
            for (const auto& [e, c] : counts) {
                conf.add({system, std::string(to_string(e)), std::string(to_string(f)), std::to_string(c.tp), std::to_string(c.fp),
                          std::to_string(c.tn), std::to_string(c.fn), fmt(c.precision()), fmt(c.recall()), fmt(c.f1()),
                          std::to_string(refusals)});
                if (f == StratumFilter::all && !c.precision().defined()) st.note(system + ":" + std::string(to_string(e)) + ": precision undefined");
                if (f == StratumFilter::all && !c.recall().defined()) st.note(system + ":" + std::string(to_string(e)) + ": recall undefined");
            }
        }
        audit_json["refusal_rate"][system] = sys.empty() ? 0.0 : double(refusals) / double(sys.size());
    }
    write_table(st, artifact::confusion, conf);

    const auto disp = disparity(index, silver_labels);
    io::CsvTable dt(prov, {"system", "emotion", "fpr_high", "fpr_low", "dfpr", "fnr_high", "fnr_low", "dfnr", "fpr_mean", "fnr_mean",
                           "n_high", "n_low"});
    for (const auto& c : disp.cells) {
        dt.add({c.system, std::string(to_string(c.emotion)), fmt(c.fpr_high()), fmt(c.fpr_low()), fmt(c.dfpr()), fmt(c.fnr_high()),
                fmt(c.fnr_low()), fmt(c.dfnr()), fmt(c.fpr_mean()), fmt(c.fnr_mean()), std::to_string(c.high.total()),
                std::to_string(c.low.total())});
        const std::string cell = c.system + ":" + std::string(to_string(c.emotion));
        if (!c.dfpr().defined()) st.note(cell + ": dFPR undefined (numerator " + fmt(c.dfpr().numerator) + ")");
        if (!c.dfnr().defined()) st.note(cell + ": dFNR undefined (numerator " + fmt(c.dfnr().numerator) + ")");
    }
    for (const auto& m : disp.missing_stratum) st.note(m + ": a stratum has no decisions; disparity skipped");
    write_table(st, artifact::disparity, dt);

    if (!cfg.full_predictions.empty()) {
        const auto full = index_predictions(gather_predictions(cfg, st, tax, cfg.full_predictions, false), cfg.score_threshold);
        io::CsvTable rt(prov, {"system", "jsd", "pearson", "delta_refusal"});
        for (const auto& [system, sample] : index) {
            const auto it = full.find(system);
            if (it == full.end()) continue;
            try {
                const auto r = sample_representativeness(sample, it->second);
                rt.add({system, fmt(r.jsd), r.pearson ? fmt(*r.pearson) : "NA", fmt(r.delta_refusal)});
            } catch (const StatsError& e) {
                st.note(system + ": representativeness: " + e.what());
            }
        }
        write_table(st, artifact::representativeness, rt);
    }
    io::write_file(st.out("audit.json"), audit_json.dump(2) + "\n");
    log << "audit: " << index.size() << " systems, " << disp.cells.size() << " disparity cells\n";
    st.finish(log);
}

inline std::map<std::string, Stratum> strata_of(const std::vector<DdmScore>& scores) {
    std::map<std::string, Stratum> out;
    for (const auto& s : scores) out[s.post_id] = s.stratum;
    return out;
}

inline void run_agree(const RunConfig& cfg, std::ostream& log) {
    Stage st(cfg, "agree");
    const auto tax = load_taxonomy(cfg.taxonomy);
    const auto annotations = require_annotations(cfg, "agree");
    const auto scores = load_ddm_scores(st.upstream(artifact::ddm, "ddm"));
    const auto strata = strata_of(scores);
    const auto index = index_predictions(gather_predictions(cfg, st, tax, cfg.predictions, true), cfg.score_threshold);
    const auto prov = provenance(cfg);

    io::CsvTable cells(prov, {"scope", "pairing", "model", "emotion", "mean_kappa", "pairs"});
    io::CsvTable pairs(prov, {"scope", "pairing", "rater_a", "rater_b", "emotion", "overlap", "kappa"});
    for (StratumFilter f : {StratumFilter::all, StratumFilter::high, StratumFilter::low}) {
        AgreementOptions opt;
        opt.filter = f;
        opt.mode = cfg.kappa_mode;
        const auto m = agreement_matrix(annotations, index, strata, opt);
        for (const auto& c : m.cells)
            cells.add({std::string(to_string(f)), std::string(to_string(c.pairing)), c.model, std::string(to_string(c.emotion)),
                       fmt(c.mean_kappa), std::to_string(c.pairs)});
        for (const auto& p : m.pairs)
            pairs.add({std::string(to_string(f)), std::string(to_string(p.pairing)), p.rater_a, p.rater_b,
                       std::string(to_string(p.emotion)), std::to_string(p.overlap), fmt(p.kappa)});
        if (m.excluded_pairs) st.note(std::string(to_string(f)) + ": " + std::to_string(m.excluded_pairs) + " rater pair(s) with < 2 shared items excluded");
    }
    write_table(st, artifact::agreement, cells);
    write_table(st, artifact::agreement_pairs, pairs);

    io::CsvTable at(prov, {"scope", "emotion", "f", "p", "df_between", "df_within", "n_ingroup", "n_outgroup"});
    std::set<std::string> high_posts;
    for (const auto& [p, s] : strata)
        if (s == Stratum::high) high_posts.insert(p);
    for (const auto& [scope, subset] : std::vector<std::pair<std::string, const std::set<std::string>*>>{{"all", nullptr}, {"high", &high_posts}}) {
        std::vector<std::string> skipped;
        for (const auto& t : anova_by_group(annotations, subset, &skipped))
            at.add({scope, std::string(to_string(t.emotion)), fmt(t.result.f), fmt(t.result.p), fmt(t.result.df_between),
                    fmt(t.result.df_within), std::to_string(t.n_ingroup), std::to_string(t.n_outgroup)});
        for (const auto& s : skipped) st.note("anova " + scope + ": " + s);
    }
    write_table(st, artifact::anova, at);
    log << "agree: " << cells.size() << " agreement cells\n";
    st.finish(log);
}

inline void run_regress(const RunConfig& cfg, std::ostream& log) {
    Stage st(cfg, "regress");
    const auto tax = load_taxonomy(cfg.taxonomy);
    const auto annotations = require_annotations(cfg, "regress");
    const auto scores = load_ddm_scores(st.upstream(artifact::ddm, "ddm"));
    const auto index = index_predictions(gather_predictions(cfg, st, tax, cfg.predictions, true), cfg.score_threshold);
    stats::OlsOptions opt;
    opt.jitter = cfg.jitter;
    opt.seed = cfg.seed;
    const auto batch = regress_features(annotations, index, scores, opt);
    const auto prov = provenance(cfg);

    io::CsvTable coef(prov, {"group", "rater", "emotion", "term", "beta", "std_err", "t_stat", "p_value", "significant"});
    io::CsvTable fit(prov, {"group", "rater", "emotion", "n", "r_squared", "excluded"});
    for (const auto& f : batch.fits) {
        const std::string e(to_string(f.emotion));
        const auto row = [&](const stats::Coefficient& c) {
            coef.add({f.rater.group, f.rater.rater, e, c.name, fmt(c.beta), fmt(c.std_err), fmt(c.t_stat), fmt(c.p_value),
                      c.p_value < 0.05 ? "1" : "0"});
        };
        row(f.result.intercept);
        for (const auto& c : f.result.coefficients) row(c);
        std::vector<std::string> excluded;
        for (const auto& x : f.result.excluded) excluded.push_back(x.name + "(" + x.reason + ")");
        fit.add({f.rater.group, f.rater.rater, e, std::to_string(f.result.n), fmt(f.result.r_squared), text::join(excluded, ";")});
    }
    for (const auto& s : batch.skipped) st.note("skipped " + s);
    write_table(st, artifact::regression, coef);
    write_table(st, artifact::regression_fit, fit);

    const auto m = feature_influence_summary(batch.fits);
    io::CsvTable inf(prov, {"group", "emotion", "feature", "mean_coefficient"});
    for (const auto& [g, by_e] : m.cells)
        for (const auto& [e, by_f] : by_e)
            for (const auto& [feat, v] : by_f) inf.add({g, std::string(to_string(e)), feat, fmt(v)});
    for (const auto& [g, by_f] : m.abs_mean)
        for (const auto& [feat, v] : by_f) inf.add({g, "|Mean|", feat, fmt(v)});
    write_table(st, artifact::influence, inf);
    log << "regress: " << batch.fits.size() << " fits, " << batch.skipped.size() << " skipped\n";
    st.finish(log);
}

inline void run_geo(const RunConfig& cfg, std::ostream& log) {
    Stage st(cfg, "geo");
    if (cfg.tracts.empty() || cfg.demographics.empty() || cfg.neighborhoods.empty())
        throw ValidationError("geo needs --tracts, --demographics and --neighborhoods");
    const auto tax = load_taxonomy(cfg.taxonomy);
    const auto corpus = load_clean_corpus(st.upstream(artifact::clean, "clean"));
    const auto scores = load_ddm_scores(st.upstream(artifact::ddm, "ddm"));
    auto tracts = geo::load_tracts(cfg.tracts);
    geo::attach_demographics(tracts, io::read_file(cfg.demographics));
    auto hoods = geo::parse_neighborhoods(io::read_file(cfg.neighborhoods));
    geo::aggregate_demographics(hoods, tracts);
    const auto join = geo::join_posts(corpus, tracts, hoods);
    const auto prov = provenance(cfg);

    st.note(std::to_string(join.without_coordinates) + " post(s) without coordinates");
    if (join.unlocated) st.note(std::to_string(join.unlocated) + " post(s) outside every tract");
    if (join.outside_neighborhoods) st.note(std::to_string(join.outside_neighborhoods) + " located post(s) in tracts without a neighborhood");

    io::CsvTable joins(prov, {"post_id", "geoid", "neighborhood"});
    for (const auto& [post, geoid] : join.tract_of) {
        const auto h = join.neighborhood_of.find(post);
        joins.add({post, geoid, h == join.neighborhood_of.end() ? "" : h->second});
    }
    write_table(st, artifact::geo_joins, joins);

    io::CsvTable ht(prov, {"neighborhood", "tracts", "posts", "pct_black", "pct_white", "population"});
    std::set<std::string> hood_names;
    for (const auto& [name, h] : hoods) {
        hood_names.insert(name);
        const auto get = [&](const char* f) {
            const auto it = h.demographics.find(f);
            return it == h.demographics.end() ? std::string("NA") : fmt(it->second);
        };
        ht.add({name, std::to_string(h.tract_geoids.size()), std::to_string(h.post_count), get("pct_black"), get("pct_white"), get("population")});
    }
    write_table(st, artifact::neighborhoods, ht);

    io::CsvTable dd(prov, {"field", "n", "r", "p"});
    try {
        const auto check = ddm_demographic_check(scores, geo::post_demographics(join, tracts));
        dd.add({"pct_black", std::to_string(check.black.n), fmt(check.black.r), fmt(check.black.p)});
        dd.add({"pct_white", std::to_string(check.white.n), fmt(check.white.r), fmt(check.white.p)});
    } catch (const StatsError& e) {
        st.note(std::string("ddm demographic check: ") + e.what());
    }
    write_table(st, artifact::ddm_demographic, dd);

    const auto index = index_predictions(gather_predictions(cfg, st, tax, cfg.predictions, true), cfg.score_threshold);
    io::CsvTable pt(prov, {"system", "emotion", "neighborhood", "posts", "probability"});
    io::CsvTable ct(prov, {"system", "emotion", "field", "neighborhoods", "r", "p", "reference_median"});
    for (const auto& [system, preds] : index) {
        for (Emotion e : kPrimaryEmotions) {
            const auto probs = geo::neighborhood_emotion_prob(preds, join.neighborhood_of, e, cfg.min_posts, hood_names);
            for (const auto& [hood, p] : probs.probability)
                pt.add({system, std::string(to_string(e)), hood, std::to_string(probs.posts.at(hood)), fmt(p)});
            for (const std::string field : {"pct_black", "pct_white"}) {
                const auto ref = geo::reference_median(e, field);
                try {
                    const auto c = geo::demographic_correlation(probs.probability, hoods, field);
                    ct.add({system, std::string(to_string(e)), field, std::to_string(c.n), fmt(c.r), fmt(c.p), ref ? fmt(*ref) : ""});
                } catch (const StatsError& err) {
                    st.note(system + ":" + std::string(to_string(e)) + ":" + field + ": " + err.what());
                }
            }
        }
    }
    write_table(st, artifact::neighborhood_probs, pt);
    write_table(st, artifact::geo_correlations, ct);
    log << "geo: " << join.tract_of.size() << " posts located, " << join.neighborhood_of.size() << " in neighborhoods\n";
    st.finish(log);
}

/// Reads a CSV table written by a stage (skipping the provenance line).
inline io::CsvTable read_table(const fs::path& path) {
    auto data = io::read_file(path);
    std::string prov;
    if (text::starts_with(data, "# ")) {
        const auto nl = data.find('\n');
        prov = data.substr(2, nl - 2);
        data = nl == std::string::npos ? "" : data.substr(nl + 1);
    }
    auto rows = io::parse_csv(data);
    if (rows.empty()) return io::CsvTable(prov, {});
    io::CsvTable t(prov, rows.front());
    for (std::size_t i = 1; i < rows.size(); ++i) t.add(std::move(rows[i]));
    return t;
}

inline std::optional<double> cell_value(const std::string& s) {
    if (s == "NA" || s.empty()) return std::nullopt;
    return text::parse_double(s);
}

inline report::BarChart disparity_chart(const io::CsvTable& t, const std::string& column, const std::string& title) {
    report::BarChart chart;
    chart.title = title;
    chart.y_label = column;
    chart.reference = 1.0;
    const auto& h = t.header();
    const auto col = static_cast<std::size_t>(std::find(h.begin(), h.end(), column) - h.begin());
    std::map<std::string, std::map<std::string, std::optional<double>>> by_system;
    for (const auto& r : t.rows()) by_system[r[0]][r[1]] = cell_value(r[col]);
    for (Emotion e : kPrimaryEmotions) chart.categories.emplace_back(to_string(e));
    for (const auto& [system, vals] : by_system) {
        report::BarSeries s{system, {}};
        for (const auto& c : chart.categories) {
            const auto it = vals.find(c);
            s.values.push_back(it == vals.end() ? std::nullopt : it->second);
        }
        chart.series.push_back(std::move(s));
    }
    return chart;
}

inline report::BarChart agreement_chart(const io::CsvTable& t) {
    report::BarChart chart;
    chart.title = "Mean pairwise Cohen's kappa (all posts)";
    chart.y_label = "kappa";
    for (Emotion e : kPrimaryEmotions) chart.categories.emplace_back(to_string(e));
    std::map<std::string, std::map<std::string, std::optional<double>>> by_series;
    for (const auto& r : t.rows()) {
        if (r[0] != "all") continue;
        const std::string name = r[2].empty() ? r[1] : r[1] + ":" + r[2];
        by_series[name][r[3]] = cell_value(r[4]);
    }
    for (const auto& [name, vals] : by_series) {
        report::BarSeries s{name, {}};
        for (const auto& c : chart.categories) {
            const auto it = vals.find(c);
            s.values.push_back(it == vals.end() ? std::nullopt : it->second);
        }
        chart.series.push_back(std::move(s));
    }
    return chart;
}

inline void run_report(const RunConfig& cfg, std::ostream& log) {
    Stage st(cfg, "report");
    const auto disparity_path = st.out(artifact::disparity);
    if (!fs::exists(disparity_path)) throw IoError("missing " + disparity_path.string() + " (run `audit` first)");
    const auto disp = read_table(disparity_path);
    if (disp.size() == 0) throw ValidationError("report: audit output is empty (no disparity rows)");

    nlohmann::json doc{{"provenance", provenance(cfg)}, {"tagger_version", std::string(kTaggerVersion)}};
    for (const char* name : {artifact::confusion, artifact::disparity, artifact::representativeness, artifact::agreement,
                             artifact::anova, artifact::regression, artifact::regression_fit, artifact::influence,
                             artifact::neighborhoods, artifact::neighborhood_probs, artifact::geo_correlations,
                             artifact::ddm_demographic}) {
        const auto path = st.out(name);
        if (!fs::exists(path)) {
            st.note(std::string(name) + " not present; omitted from report");
            continue;
        }
        const auto t = read_table(path);
        doc["tables"][name] = {{"header", t.header()}, {"rows", t.rows()}};
    }
    const auto summary = st.out(artifact::silver_summary);
    if (fs::exists(summary)) doc["silver_summary"] = nlohmann::json::parse(io::read_file(summary));
    io::write_file(st.out(artifact::report), doc.dump(2) + "\n");
    io::write_file(st.out("disparity_fpr.svg"),
                   report::grouped_bar_svg(disparity_chart(disp, "dfpr", "False positive rate ratio, high / low DDM")));
    io::write_file(st.out("disparity_fnr.svg"),
                   report::grouped_bar_svg(disparity_chart(disp, "dfnr", "False negative rate ratio, high / low DDM")));
    const auto agreement_path = st.out(artifact::agreement);
    if (fs::exists(agreement_path))
        io::write_file(st.out("agreement.svg"), report::grouped_bar_svg(agreement_chart(read_table(agreement_path))));
    log << "report: " << doc["tables"].size() << " tables bundled\n";
    st.finish(log);
}

/// Runs every stage whose inputs are configured, in pipeline order.
inline void run_all(const RunConfig& cfg, std::ostream& log) {
    run_clean(cfg, log);
    run_annotate(cfg, log);
    run_ddm(cfg, log);
    if (!cfg.annotations.empty()) run_silver(cfg, log);
    const bool have_preds = !cfg.predictions.empty() || !cfg.lexicon.empty();
    if (!cfg.annotations.empty() && have_preds) {
        run_audit(cfg, log);
        run_agree(cfg, log);
        run_regress(cfg, log);
    }
    if (!cfg.tracts.empty() && have_preds) run_geo(cfg, log);
    if (!cfg.annotations.empty() && have_preds) run_report(cfg, log);
}

} // namespace aave::pipeline
