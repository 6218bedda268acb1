#include <gtest/gtest.h>

#include "aaveaudit/annotate.hpp"
#include "test_support.hpp"

using namespace aave;
using testing_support::TempDir;

namespace {

std::vector<Pos> tags(std::string_view text) {
    std::vector<Pos> out;
    for (const auto& t : annotate_text(text).tokens) out.push_back(t.pos);
    return out;
}

CleanPost post(std::string id, std::string text) {
    CleanPost p;
    p.id = std::move(id);
    p.text = std::move(text);
    p.token_count = text::split_whitespace(p.text).size();
    return p;
}

} // namespace

TEST(Tagger, ShippedExamples) {
    EXPECT_EQ(tags("she a nurse"), (std::vector<Pos>{Pos::PRON, Pos::DET, Pos::NOUN}));
    EXPECT_EQ(tags("done"), (std::vector<Pos>{Pos::VERB_PAST}));
}

TEST(Tagger, SuffixRules) {
    EXPECT_EQ(tag_word("complaining"), Pos::VERB_GER);
    EXPECT_EQ(tag_word("complainin'"), Pos::VERB_GER);
    EXPECT_EQ(tag_word("divorced"), Pos::VERB_PAST);
    EXPECT_EQ(tag_word("quickly"), Pos::ADV);
    EXPECT_EQ(tag_word("42"), Pos::NUM);
    EXPECT_EQ(tag_word("!!"), Pos::PUNCT);
}

TEST(Tagger, AssCompoundDependencies) {
    const auto doc = annotate_text("we was at some random-ass bar");
    const auto& t = doc.tokens[4];
    ASSERT_TRUE(t.dep.has_value());
    EXPECT_EQ(*t.dep, Dep::COMPOUND);
    const auto obj = annotate_text("i divorced his ass");
    ASSERT_TRUE(obj.tokens[3].dep.has_value());
    EXPECT_EQ(*obj.tokens[3].dep, Dep::DOBJ);
    ASSERT_TRUE(obj.tokens[2].dep.has_value());
    EXPECT_EQ(*obj.tokens[2].dep, Dep::POSS);
}

TEST(Tagger, PureFunctionOfText) {
    const auto a = annotate_text("she steady complaining about him", "x");
    const auto b = annotate_text("she steady complaining about him", "x");
    EXPECT_EQ(a, b);
}

TEST(AnnotationFormat, RoundTripIsLossless) {
    std::vector<AnnotatedDoc> docs{annotate_text("i divorced his ass lol", "t1"),
                                   annotate_text("we was at some random-ass bar", "t2")};
    const auto text = export_annotations(docs);
    const auto back = parse_annotation_blocks(text::split(text, '\n'), "<mem>");
    ASSERT_EQ(back.size(), 2u);
    for (std::size_t i = 0; i < docs.size(); ++i) {
        EXPECT_EQ(back[i].post_id, docs[i].post_id);
        EXPECT_EQ(back[i].tokens, docs[i].tokens);
    }
}

TEST(AnnotationImport, MatchingDocOverrides) {
    TempDir dir("annot");
    const std::vector<CleanPost> corpus{post("t1", "she done left already fr real")};
    auto doc = annotate_text(corpus[0].text, "t1");
    doc.tokens[1].pos = Pos::ADV;
    const auto path = dir.write("a.tsv", export_annotations({doc}));
    const auto imp = import_annotations(path, corpus);
    ASSERT_EQ(imp.docs.size(), 1u);
    EXPECT_EQ(imp.docs.at("t1").tokens[1].pos, Pos::ADV);
    EXPECT_EQ(imp.docs.at("t1").source, AnnotationSource::imported);
    EXPECT_TRUE(imp.diagnostics.empty());
}

TEST(AnnotationImport, TokenCountMismatchIsRejectedWithDiagnostic) {
    TempDir dir("annot");
    const std::vector<CleanPost> corpus{post("t1", "she done left already fr real")};
    const auto path = dir.write("a.tsv", export_annotations({annotate_text("she done left already fr", "t1")}));
    const auto imp = import_annotations(path, corpus);
    EXPECT_TRUE(imp.docs.empty());
    ASSERT_EQ(imp.diagnostics.size(), 1u);
}

TEST(AnnotationImport, EmptyFileAndUnknownId) {
    TempDir dir("annot");
    const std::vector<CleanPost> corpus{post("t1", "she done left already fr real")};
    EXPECT_TRUE(import_annotations(dir.write("empty.tsv", ""), corpus).docs.empty());
    const auto bad = dir.write("bad.tsv", export_annotations({annotate_text("x y z", "zz")}));
    EXPECT_THROW(import_annotations(bad, corpus), ValidationError);
}

TEST(AnnotationImport, UnknownTagIsSchemaError) {
    TempDir dir("annot");
    const std::vector<CleanPost> corpus{post("t1", "a")};
    const auto path = dir.write("a.tsv", "#id t1\n0\ta\tWIDGET\t_\t_\n");
    EXPECT_THROW(import_annotations(path, corpus), SchemaError);
}
