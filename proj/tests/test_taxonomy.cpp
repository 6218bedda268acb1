#include <gtest/gtest.h>

#include "aaveaudit/taxonomy.hpp"
#include "test_support.hpp"

using namespace aave;

namespace {

const TaxonomyMap& default_map() {
    static const TaxonomyMap t = load_taxonomy(testing_support::data_dir() / "taxonomy_default.tsv");
    return t;
}

} // namespace

TEST(Taxonomy, PrimariesMapToThemselves) {
    for (Emotion e : kAllEmotions) {
        EXPECT_EQ(default_map().map_label(to_string(e)), e);
        EXPECT_EQ(default_map().map_label(to_string(default_map().map_label(to_string(e)))), e);
    }
}

TEST(Taxonomy, DefaultTableIsTotalOverGoEmotionsAndPlutchik) {
    const std::vector<std::string> goemotions{
        "admiration", "amusement", "anger",       "annoyance",   "approval", "caring",      "confusion",
        "curiosity",  "desire",    "disappointment", "disapproval", "disgust", "embarrassment", "excitement",
        "fear",       "gratitude", "grief",       "joy",         "love",     "nervousness", "optimism",
        "pride",      "realization", "relief",    "remorse",     "sadness",  "surprise"};
    const std::vector<std::string> plutchik{"joy", "trust", "fear", "surprise", "sadness", "disgust", "anger", "anticipation"};
    ASSERT_EQ(goemotions.size(), 27u);
    for (const auto& l : goemotions) EXPECT_NO_THROW(default_map().map_label(l)) << l;
    for (const auto& l : plutchik) EXPECT_NO_THROW(default_map().map_label(l)) << l;
    EXPECT_EQ(default_map().map_label("annoyance"), Emotion::anger);
}

TEST(Taxonomy, UnknownLabelIsError) { EXPECT_THROW(default_map().map_label("zeal"), ValidationError); }

TEST(Taxonomy, FileErrors) {
    EXPECT_THROW(parse_taxonomy("joy\thappiness\tcustom\n"), ValidationError);
    EXPECT_THROW(parse_taxonomy("glee\tjoy\tx\nglee\tlove\tx\n"), ValidationError);
    EXPECT_THROW(parse_taxonomy("glee joy\n"), SchemaError);
    const auto empty = parse_taxonomy("");
    EXPECT_EQ(empty.size(), 0u);
    EXPECT_THROW(empty.map_label("joy"), ValidationError);
}
