#include <gtest/gtest.h>

#include "aaveaudit/features.hpp"
#include "aaveaudit/util/io.hpp"
#include "json.hpp"
#include "test_support.hpp"

using namespace aave;
using testing_support::TempDir;

namespace {

FeatureVector detect_text(std::string_view text) { return detect_all(annotate_text(text), all_builtin_features()); }

struct Golden {
    std::string text;
    std::map<std::string, long> expected;
};

std::vector<Golden> golden_corpus() {
    std::vector<Golden> out;
    for (const auto& line : io::read_lines(testing_support::data_dir() / "fixtures" / "golden_detectors.jsonl")) {
        if (text::trim(line).empty()) continue;
        const auto j = nlohmann::json::parse(line);
        out.push_back({j.at("text").get<std::string>(), j.at("features").get<std::map<std::string, long>>()});
    }
    return out;
}

} // namespace

TEST(Detectors, GoldenCorpusFiresExactlyItsFeatures) {
    const auto corpus = golden_corpus();
    ASSERT_EQ(corpus.size(), 8u);
    for (const auto& g : corpus) {
        const auto fv = detect_text(g.text);
        for (const auto& [f, c] : fv.counts) {
            const auto it = g.expected.find(f);
            EXPECT_EQ(c, it == g.expected.end() ? 0 : it->second) << g.text << " / " << f;
        }
    }
}

TEST(Detectors, MoreLexicalHits) {
    EXPECT_EQ(detect_text("iont know what he talm bout fr").counts.at("abbreviations"), 2);
    EXPECT_EQ(detect_text("we finna go tryna see it").counts.at("slang"), 2);
    EXPECT_EQ(detect_text("they gonna be late").counts.at("habitual_be"), 0);
}

TEST(Detectors, DeterministicPerDoc) {
    const auto doc = annotate_text("she steady complaining about his ass fr");
    EXPECT_EQ(detect_all(doc, all_builtin_features()), detect_all(doc, all_builtin_features()));
}

TEST(Detectors, LexicalFeaturesAreMonotoneUnderConcatenation) {
    const std::vector<std::string> texts{"he ain't finna go iont think so", "talm bout nun doe", "the weather is nice today",
                                         "ain't nobody tryna hear that"};
    for (const auto& a : texts) {
        for (const auto& b : texts) {
            const auto fa = detect_text(a);
            const auto fb = detect_text(b);
            const auto fab = detect_text(a + " " + b);
            for (const char* f : {"abbreviations", "aint", "n_use", "slang"}) {
                EXPECT_GE(fab.counts.at(f), fa.counts.at(f)) << a << " + " << b;
                EXPECT_GE(fab.counts.at(f), fb.counts.at(f)) << a << " + " << b;
            }
        }
    }
}

TEST(Detectors, EnabledSetValidated) {
    const auto doc = annotate_text("x");
    EXPECT_THROW(detect_all(doc, {}), ValidationError);
    EXPECT_THROW(detect_all(doc, {"aint", "ext:ppl"}), ValidationError);
    const auto fv = detect_all(doc, {"aint"});
    EXPECT_EQ(fv.counts.size(), 1u);
}

TEST(ExternalScores, ParsesAndValidates) {
    TempDir dir("ext");
    const auto ok = import_external_scores(dir.write("s.tsv", "t1\text:ppl_diff\t3.2\n"));
    EXPECT_DOUBLE_EQ(ok.at("t1").at("ext:ppl_diff"), 3.2);
    EXPECT_TRUE(import_external_scores(dir.write("e.tsv", "")).empty());
    try {
        import_external_scores(dir.write("bad.tsv", "t1\text:a\t1\nt2\text:a\tabc\n"));
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
    }
    const std::set<std::string> known{"t1"};
    EXPECT_THROW(import_external_scores(dir.write("u.tsv", "t9\text:a\t1\n"), &known), ValidationError);
}
