#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "annotate.hpp"
#include "error.hpp"
#include "util/io.hpp"
#include "util/text.hpp"

namespace aave {

/// Names of the built-in detectors, in registry order.
inline constexpr std::array<std::string_view, 10> kBuiltinFeatures{
    "abbreviations", "aint", "ass_camo", "completive_done", "continuative_steady",
    "copula_deletion", "habitual_be", "n_use", "slang", "subj_verb_agreement",
};

inline constexpr std::string_view kExternalPrefix = "ext:";

inline bool is_builtin_feature(std::string_view name) {
    return std::find(kBuiltinFeatures.begin(), kBuiltinFeatures.end(), name) != kBuiltinFeatures.end();
}

inline bool is_external_feature(std::string_view name) {
    return name.size() > kExternalPrefix.size() && text::starts_with(name, kExternalPrefix);
}

/// Perplexity-derived external features are kept out of the regressions.
inline bool is_perplexity_feature(std::string_view name) { return text::starts_with(name, "ext:ppl"); }

inline std::set<std::string> all_builtin_features() {
    return {kBuiltinFeatures.begin(), kBuiltinFeatures.end()};
}

struct FeatureVector {
    std::string post_id;
    std::map<std::string, long> counts;
    std::size_t token_count = 0;

    bool operator==(const FeatureVector&) const = default;
};

namespace detectors {

using lexicon::Set;

inline const Set& abbreviation_words() {
    static const Set s{"iont", "iono", "ioneem", "sumn", "talmbout"};
    return s;
}

inline const Set& aint_words() {
    static const Set s{"ain't", "aint", "yeen"};
    return s;
}

inline const Set& slang_words() {
    static const Set s{"jawn", "finna", "doe", "nawl", "nun", "sholl", "tryna", "cuh"};
    return s;
}

inline const Set& subject_pronouns() {
    static const Set s{"he", "she", "they", "we", "you", "i", "it"};
    return s;
}

inline const Set& third_singular_pronouns() {
    static const Set s{"he", "she", "it"};
    return s;
}

/// Markers that make a following "be" non-habitual (infinitive, future, modal).
inline const Set& be_blockers() {
    static const Set s{"to", "will", "would", "can", "could", "should", "must", "might", "may", "gonna"};
    return s;
}

inline bool is_n_word(std::string_view w) {
    if (text::ends_with(w, "s")) w.remove_suffix(1);
    return w == "nigga" || w == "n*gga";
}

struct View {
    const std::vector<Token>& tokens;
    std::vector<std::string> words;

    explicit View(const std::vector<Token>& t) : tokens(t) {
        words.reserve(t.size());
        for (const auto& tok : t) words.push_back(word_of(tok));
    }

    std::size_t size() const { return tokens.size(); }
    Pos pos(std::size_t i) const { return tokens[i].pos; }
};

inline long abbreviations(const View& v) {
    long n = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (abbreviation_words().contains(v.words[i])) ++n;
        if (v.words[i] == "talm" && i + 1 < v.size() && v.words[i + 1] == "bout") ++n;
    }
    return n;
}

inline long lexical(const View& v, const Set& words) {
    return std::count_if(v.words.begin(), v.words.end(), [&](const std::string& w) { return words.contains(w); });
}

// "ass" governed by a possessive (adjacent possessive pronoun or a POSS
// dependent pointing at it), or any `<word>-ass` compound.
inline long ass_camo(const View& v) {
    long n = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (is_ass_compound(v.words[i])) {
            ++n;
            continue;
        }
        if (v.words[i] != "ass") continue;
        bool possessed = i > 0 && lexicon::possessive_pronouns().contains(v.words[i - 1]);
        for (std::size_t j = 0; j < v.size() && !possessed; ++j)
            possessed = v.tokens[j].dep == Dep::POSS && v.tokens[j].head == i;
        if (possessed) ++n;
    }
    return n;
}

inline long completive_done(const View& v) {
    long n = 0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        if (v.words[i] == "done" && v.pos(i + 1) == Pos::VERB_PAST) ++n;
    return n;
}

inline long continuative_steady(const View& v) {
    long n = 0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        if (v.words[i] == "steady" && v.pos(i + 1) != Pos::NOUN) ++n;
    return n;
}

inline long copula_deletion(const View& v) {
    long n = 0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        if (!subject_pronouns().contains(v.words[i])) continue;
        const Pos next = v.pos(i + 1);
        const bool noun_phrase = next == Pos::DET && i + 2 < v.size() &&
                                 (v.pos(i + 2) == Pos::NOUN || v.pos(i + 2) == Pos::ADJ || v.pos(i + 2) == Pos::NUM);
        if (noun_phrase || next == Pos::NOUN || next == Pos::ADJ || next == Pos::VERB_GER) ++n;
    }
    return n;
}

inline long habitual_be(const View& v) {
    long n = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v.words[i] != "be") continue;
        if (v.pos(i - 1) != Pos::PRON && v.pos(i - 1) != Pos::NOUN) continue;
        bool blocked = false;
        for (std::size_t back = 1; back <= 2 && back <= i; ++back) {
            const std::string& w = v.words[i - back];
            if (be_blockers().contains(w) || text::ends_with(w, "'ll") || text::ends_with(w, "'d")) blocked = true;
        }
        if (!blocked) ++n;
    }
    return n;
}

inline long n_use(const View& v) {
    return std::count_if(v.words.begin(), v.words.end(), [](const std::string& w) { return is_n_word(w); });
}

inline long subj_verb_agreement(const View& v) {
    long n = 0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        const std::string& subj = v.words[i];
        const bool third_singular = third_singular_pronouns().contains(subj) ||
                                    (v.pos(i) == Pos::NOUN && !text::ends_with(subj, "s"));
        if (!third_singular) continue;
        const std::string& verb = v.words[i + 1];
        if (verb == "don't" || verb == "dont") {
            ++n;
        } else if (v.pos(i + 1) == Pos::VERB && !lexicon::auxiliaries().contains(verb) && !text::ends_with(verb, "s")) {
            ++n;
        }
    }
    return n;
}

} // namespace detectors

/// Match count of one built-in feature in `doc`.
inline long detect_feature(std::string_view feature, const AnnotatedDoc& doc) {
    const detectors::View v(doc.tokens);
    if (feature == "abbreviations") return detectors::abbreviations(v);
    if (feature == "aint") return detectors::lexical(v, detectors::aint_words());
    if (feature == "ass_camo") return detectors::ass_camo(v);
    if (feature == "completive_done") return detectors::completive_done(v);
    if (feature == "continuative_steady") return detectors::continuative_steady(v);
    if (feature == "copula_deletion") return detectors::copula_deletion(v);
    if (feature == "habitual_be") return detectors::habitual_be(v);
    if (feature == "n_use") return detectors::n_use(v);
    if (feature == "slang") return detectors::lexical(v, detectors::slang_words());
    if (feature == "subj_verb_agreement") return detectors::subj_verb_agreement(v);
    throw ValidationError("unknown feature '" + std::string(feature) + "'");
}

/// Runs every enabled built-in detector. External (`ext:`) features carry
/// imported values and are not detected here.
inline FeatureVector detect_all(const AnnotatedDoc& doc, const std::set<std::string>& enabled) {
    if (enabled.empty()) throw ValidationError("no features enabled");
    for (const auto& f : enabled)
        if (!is_builtin_feature(f)) throw ValidationError("unknown feature '" + f + "'");
    FeatureVector fv;
    fv.post_id = doc.post_id;
    fv.token_count = doc.tokens.size();
    for (const auto& f : enabled) fv.counts[f] = detect_feature(f, doc);
    return fv;
}

/// (post_id, ext:feature) -> value, as imported.
using ExternalScores = std::map<std::string, std::map<std::string, double>>;

/// Reads `post_id<TAB>feature<TAB>value` lines. When `known_ids` is non-null,
/// ids outside it are an error.
inline ExternalScores import_external_scores(const std::filesystem::path& path,
                                             const std::set<std::string>* known_ids = nullptr) {
    ExternalScores out;
    std::size_t lineno = 0;
    for (const auto& line : io::read_lines(path)) {
        ++lineno;
        if (text::trim(line).empty() || line.front() == '#') continue;
        const std::string where = path.string() + ":" + std::to_string(lineno) + ": ";
        const auto cols = text::split(line, '\t');
        if (cols.size() != 3) throw SchemaError(where + "expected post_id<TAB>feature<TAB>value");
        if (!is_external_feature(cols[1])) throw SchemaError(where + "external feature '" + cols[1] + "' must start with ext:");
        const auto value = text::parse_double(cols[2]);
        if (!value) throw SchemaError(where + "non-numeric value '" + cols[2] + "'");
        if (known_ids && !known_ids->contains(cols[0])) throw ValidationError(where + "unknown post id '" + cols[0] + "'");
        out[cols[0]][cols[1]] = *value;
    }
    return out;
}

inline std::set<std::string> external_feature_names(const ExternalScores& scores) {
    std::set<std::string> out;
    for (const auto& [id, m] : scores)
        for (const auto& [f, v] : m) out.insert(f);
    return out;
}

} // namespace aave
