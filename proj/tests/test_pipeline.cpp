#include <gtest/gtest.h>

#include <sstream>

#include "aaveaudit/pipeline.hpp"
#include "test_support.hpp"

using namespace aave;
using testing_support::TempDir;
namespace fs = std::filesystem;

namespace {

pipeline::RunConfig fixture_config(const fs::path& out) {
    const auto fx = testing_support::data_dir() / "fixtures";
    pipeline::RunConfig cfg;
    cfg.corpus = fx / "corpus.jsonl";
    cfg.annotations = fx / "annotations.jsonl";
    cfg.predictions = {fx / "predictions.jsonl"};
    cfg.full_predictions = {fx / "full_predictions.jsonl"};
    cfg.lexicon = fx / "lexicon.tsv";
    cfg.tracts = fx / "tracts.geojson";
    cfg.demographics = fx / "demographics.csv";
    cfg.neighborhoods = fx / "neighborhoods.csv";
    cfg.min_posts = 5;
    cfg.out_dir = out;
    return cfg;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) out[e.path().filename().string()] = io::read_file(e.path());
    return out;
}

} // namespace

TEST(Pipeline, DdmStageOnTwoPostFixture) {
    TempDir dir("pipe");
    io::write_file(dir.path() / "clean.jsonl",
                   R"({"id":"A","text":"he ain't got no car","token_count":5}
{"id":"B","text":"the weather is nice today","token_count":5}
)");
    pipeline::RunConfig cfg;
    cfg.out_dir = dir.path();
    cfg.ddm_threshold = 0.07;
    std::ostringstream log;
    pipeline::run_annotate(cfg, log);
    pipeline::run_ddm(cfg, log);
    const auto scores = load_ddm_scores(dir.path() / "ddm.jsonl");
    ASSERT_EQ(scores.size(), 2u);
    EXPECT_NEAR(scores[0].ddm, 0.10, 1e-9);
    EXPECT_EQ(scores[0].stratum, Stratum::high);
    EXPECT_NEAR(scores[1].ddm, 0.0, 1e-9);
    EXPECT_EQ(scores[1].stratum, Stratum::low);
}

TEST(Pipeline, MissingUpstreamNamesProducer) {
    TempDir dir("pipe");
    pipeline::RunConfig cfg;
    cfg.out_dir = dir.path();
    std::ostringstream log;
    try {
        pipeline::run_ddm(cfg, log);
        FAIL();
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("`annotate`"), std::string::npos) << e.what();
    }
}

TEST(Pipeline, ReportOnEmptyAuditIsValidationError) {
    TempDir dir("pipe");
    pipeline::RunConfig cfg;
    cfg.out_dir = dir.path();
    io::write_file(dir.path() / "disparity.csv", "# provenance\nsystem,emotion,dfpr\n");
    std::ostringstream log;
    EXPECT_THROW(pipeline::run_report(cfg, log), ValidationError);
}

TEST(Pipeline, FullRunIsDeterministicAndStamped) {
    TempDir a("pipe-a"), b("pipe-b");
    std::ostringstream log;
    pipeline::run_all(fixture_config(a.path()), log);
    pipeline::run_all(fixture_config(b.path()), log);
    const auto sa = snapshot(a.path());
    const auto sb = snapshot(b.path());
    EXPECT_EQ(sa, sb);
    const std::string prov = "# " + pipeline::provenance(fixture_config(a.path()));
    for (const auto& [name, body] : sa) {
        if (!name.ends_with(".csv")) continue;
        EXPECT_EQ(body.substr(0, body.find('\n')), prov) << name;
    }
    for (const char* required : {"clean.jsonl", "ddm.jsonl", "silver.jsonl", "confusion.csv", "disparity.csv", "agreement.csv",
                                 "regression.csv", "geo_correlations.csv", "report.json", "disparity_fpr.svg"})
        EXPECT_TRUE(sa.contains(required)) << required;
}

TEST(Pipeline, StrictTurnsDiagnosticsIntoFailures) {
    TempDir dir("pipe");
    auto cfg = fixture_config(dir.path());
    cfg.strict = true;
    std::ostringstream log;
    pipeline::run_clean(cfg, log);
    pipeline::run_annotate(cfg, log);
    pipeline::run_ddm(cfg, log);
    pipeline::run_silver(cfg, log);
    // The fixture has undefined disparity ratios.
    EXPECT_THROW(pipeline::run_audit(cfg, log), ValidationError);
}

TEST(Pipeline, ConfigValidation) {
    pipeline::RunConfig cfg;
    cfg.ddm_threshold = 1.5;
    EXPECT_THROW(cfg.validate(), ValidationError);
    cfg.ddm_threshold = 0.07;
    cfg.corpus = "/nonexistent/corpus.jsonl";
    EXPECT_THROW(cfg.validate(), IoError);
    cfg.corpus.clear();
    cfg.features = {"aint", "bogus"};
    EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(Pipeline, ConfigHashIgnoresOutputDir) {
    auto a = fixture_config("/tmp/x");
    auto b = fixture_config("/tmp/y");
    EXPECT_EQ(a.hash(), b.hash());
    b.score_threshold = 0.1;
    EXPECT_NE(a.hash(), b.hash());
}
