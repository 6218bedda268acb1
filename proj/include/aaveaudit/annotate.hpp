#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "corpus.hpp"
#include "error.hpp"
#include "util/io.hpp"
#include "util/text.hpp"

namespace aave {

enum class Pos { NOUN, PRON, VERB, VERB_PAST, VERB_GER, ADJ, ADV, DET, ADP, PUNCT, NUM, OTHER };
enum class Dep { POSS, DOBJ, COMPOUND, AMOD, PUNCT_REL, OTHER };

inline constexpr std::array<std::pair<Pos, std::string_view>, 12> kPosNames{{
    {Pos::NOUN, "NOUN"}, {Pos::PRON, "PRON"}, {Pos::VERB, "VERB"}, {Pos::VERB_PAST, "VERB_PAST"},
    {Pos::VERB_GER, "VERB_GER"}, {Pos::ADJ, "ADJ"}, {Pos::ADV, "ADV"}, {Pos::DET, "DET"},
    {Pos::ADP, "ADP"}, {Pos::PUNCT, "PUNCT"}, {Pos::NUM, "NUM"}, {Pos::OTHER, "OTHER"},
}};

inline constexpr std::array<std::pair<Dep, std::string_view>, 6> kDepNames{{
    {Dep::POSS, "POSS"}, {Dep::DOBJ, "DOBJ"}, {Dep::COMPOUND, "COMPOUND"},
    {Dep::AMOD, "AMOD"}, {Dep::PUNCT_REL, "PUNCT_REL"}, {Dep::OTHER, "OTHER"},
}};

inline std::string_view to_string(Pos p) {
    for (const auto& [k, v] : kPosNames)
        if (k == p) return v;
    return "OTHER";
}

inline std::string_view to_string(Dep d) {
    for (const auto& [k, v] : kDepNames)
        if (k == d) return v;
    return "OTHER";
}

inline std::optional<Pos> parse_pos(std::string_view s) {
    for (const auto& [k, v] : kPosNames)
        if (v == s) return k;
    return std::nullopt;
}

inline std::optional<Dep> parse_dep(std::string_view s) {
    for (const auto& [k, v] : kDepNames)
        if (v == s) return k;
    return std::nullopt;
}

struct Token {
    std::size_t index = 0;
    std::string surface;
    std::string lower;
    Pos pos = Pos::OTHER;
    std::optional<Dep> dep;
    std::optional<std::size_t> head;

    bool operator==(const Token&) const = default;
};

enum class AnnotationSource { internal, imported };

struct AnnotatedDoc {
    std::string post_id;
    std::vector<Token> tokens;
    AnnotationSource source = AnnotationSource::internal;

    bool operator==(const AnnotatedDoc&) const = default;
};

inline constexpr std::string_view kTaggerVersion = "heuristic-tagger/1.0";

/// Lower-cased surface with curly apostrophes folded to ASCII.
inline std::string normalize_lower(std::string_view surface) {
    std::string s = text::to_lower(surface);
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        // U+2018 / U+2019
        if (i + 2 < s.size() && s[i] == '\xE2' && s[i + 1] == '\x80' && (s[i + 2] == '\x98' || s[i + 2] == '\x99')) {
            out += '\'';
            i += 2;
            continue;
        }
        out += s[i];
    }
    return out;
}

/// The lexical core of a token: `lower` without leading/trailing punctuation.
/// Inner apostrophes, hyphens and asterisks survive ("ain't", "random-ass", "n*gga").
inline std::string word_of(std::string_view lower) {
    const auto is_core = [](char c) {
        return static_cast<unsigned char>(c) >= 0x80 || std::isalnum(static_cast<unsigned char>(c));
    };
    std::size_t b = 0;
    std::size_t e = lower.size();
    while (b < e && !is_core(lower[b])) ++b;
    while (e > b && !is_core(lower[e - 1])) --e;
    std::string w(lower.substr(b, e - b));
    // "talkin'" keeps its trailing apostrophe so the g-dropping suffix stays visible.
    if (e < lower.size() && lower[e] == '\'' && text::ends_with(w, "in")) w += '\'';
    return w;
}

inline std::string word_of(const Token& t) { return word_of(t.lower); }

namespace lexicon {

using Set = std::unordered_set<std::string_view>;

inline const Set& pronouns() {
    static const Set s{"i", "me", "my", "mine", "myself", "you", "your", "yours", "yourself", "he", "him",
                       "his", "himself", "she", "her", "hers", "herself", "it", "its", "itself", "we", "us",
                       "our", "ours", "ourselves", "they", "them", "their", "theirs", "themselves", "y'all",
                       "yall", "u", "ya", "yo", "i'm", "im", "i'll", "you'll", "he'll", "she'll", "we'll",
                       "they'll", "it'll", "i'd", "you'd", "he'd", "she'd", "we'd", "they'd", "he's", "she's",
                       "it's", "you're", "we're", "they're", "i've", "you've", "we've", "they've", "somebody",
                       "someone", "everybody", "everyone", "nobody", "anybody", "anyone", "something",
                       "nothing", "everything", "anything", "who", "whom", "whose"};
    return s;
}

inline const Set& possessive_pronouns() {
    static const Set s{"my", "your", "his", "her", "its", "our", "their", "yo", "ya"};
    return s;
}

inline const Set& determiners() {
    static const Set s{"a", "an", "the", "this", "that", "these", "those", "some", "any", "no", "every",
                       "each", "all", "another", "both", "either", "neither", "many", "few", "several",
                       "such", "much"};
    return s;
}

inline const Set& adpositions() {
    static const Set s{"about", "above", "across", "after", "against", "along", "among", "around", "at",
                       "before", "behind", "below", "beneath", "beside", "between", "beyond", "by", "down",
                       "during", "for", "from", "in", "inside", "into", "near", "of", "off", "on", "onto",
                       "out", "outside", "over", "since", "through", "till", "to", "toward", "towards",
                       "under", "until", "up", "upon", "with", "within", "without", "bout"};
    return s;
}

inline const Set& adverbs() {
    static const Set s{"already", "also", "always", "again", "almost", "even", "ever", "here", "there",
                       "just", "never", "not", "now", "often", "only", "quite", "rather", "really", "so",
                       "soon", "still", "then", "too", "very", "well", "yet", "today", "tonight", "tomorrow",
                       "yesterday", "maybe", "sometimes", "steady", "lowkey", "highkey", "fr", "forreal",
                       "ago", "away", "back", "together", "anymore", "once", "twice", "why", "how", "when",
                       "where"};
    return s;
}

inline const Set& other_words() {
    static const Set s{"and", "or", "but", "if", "because", "cause", "cuz", "while", "than", "as", "nor",
                       "lol", "lmao", "smh", "omg", "yes", "yeah", "yea", "no", "nah", "nawl", "oh", "ok",
                       "okay", "please", "yeen"};
    return s;
}

/// Auxiliaries, modals and copulas: never bare lexical verbs.
inline const Set& auxiliaries() {
    static const Set s{"is", "am", "are", "be", "been", "being", "do", "does", "have", "has", "will",
                       "would", "can", "could", "should", "must", "might", "may", "shall", "ain't", "aint",
                       "gonna", "wanna", "gotta", "can't", "cant", "won't", "wont", "isn't", "aren't",
                       "doesn't", "don't", "dont", "finna", "tryna"};
    return s;
}

inline const Set& past_auxiliaries() {
    static const Set s{"was", "were", "did", "had", "didn't", "wasn't", "weren't", "hadn't", "couldn't",
                       "wouldn't", "shouldn't"};
    return s;
}

inline const Set& base_verbs() {
    static const Set s{"go", "get", "say", "make", "know", "think", "take", "see", "come", "want", "look",
                       "use", "find", "give", "tell", "work", "call", "try", "ask", "need", "feel", "become",
                       "leave", "put", "mean", "keep", "let", "begin", "seem", "help", "talk", "turn",
                       "start", "show", "hear", "play", "run", "move", "like", "live", "believe", "hold",
                       "bring", "happen", "write", "sit", "stand", "lose", "pay", "meet", "learn", "change",
                       "lead", "understand", "watch", "follow", "stop", "speak", "read", "spend", "grow",
                       "open", "walk", "win", "teach", "remember", "love", "hate", "care", "eat", "drink",
                       "sleep", "cry", "laugh", "complain", "wait", "stay", "die", "buy", "sell", "send",
                       "fall", "cut", "kill", "pass", "sing", "dance", "drive", "ride", "act", "play",
                       "miss", "wish", "hope", "trust", "fight", "cook", "clean", "text", "post", "check",
                       "listen", "smile", "worry", "matter", "pull", "push", "wear", "throw", "catch",
                       "break", "forget", "forgive", "understand", "finish", "enjoy", "deserve"};
    return s;
}

inline const Set& irregular_past() {
    static const Set s{"went", "did", "done", "left", "got", "came", "saw", "said", "made", "took", "gave",
                       "told", "knew", "thought", "found", "felt", "became", "brought", "bought", "ran",
                       "ate", "drank", "slept", "sat", "stood", "lost", "paid", "met", "kept", "began",
                       "held", "wrote", "spoke", "broke", "heard", "meant", "sent", "fell", "won", "taught",
                       "caught", "fought", "threw", "drove", "rode", "sang", "understood", "forgot",
                       "forgave", "hid", "bit", "blew", "chose", "drew", "flew", "froze", "grew", "hung",
                       "led", "sold", "shot", "stole", "struck", "swam", "swore", "tore", "woke", "wore",
                       "been", "gone", "seen", "taken", "given", "known", "eaten", "fallen", "written",
                       "spoken", "broken", "driven", "forgotten", "hidden", "ridden", "stolen", "woken",
                       "worn", "begun", "drunk", "sung", "swum", "spent", "built", "sought", "dealt"};
    return s;
}

inline const Set& adjectives() {
    static const Set s{"nice", "good", "bad", "happy", "sad", "mad", "tired", "big", "small", "little",
                       "new", "old", "great", "crazy", "ugly", "pretty", "ready", "sick", "hungry", "real",
                       "dumb", "cool", "hot", "cold", "funny", "fine", "random", "wrong", "right", "sure",
                       "high", "low", "long", "short", "young", "rich", "poor", "fake", "true", "hard",
                       "easy", "busy", "lazy", "scared", "angry", "upset", "proud", "sorry", "free",
                       "dope", "fly", "lit", "petty", "bougie", "ratchet", "salty", "extra", "weird",
                       "strange", "quiet", "loud", "early", "late", "best", "worst", "better", "worse",
                       "silly", "holy", "full", "empty", "same", "different", "whole", "broke", "fresh",
                       "clean", "dirty", "sweet", "mean", "nasty", "wild", "dead", "alive", "awake"};
    return s;
}

inline const Set& number_words() {
    static const Set s{"one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
                       "eleven", "twelve", "twenty", "thirty", "hundred", "thousand", "million"};
    return s;
}

inline const Set& ing_nouns() {
    static const Set s{"thing", "things", "nothing", "something", "everything", "anything", "morning",
                       "evening", "king", "ring", "spring", "ceiling", "wedding", "building", "during",
                       "sibling", "darling", "feeling", "meeting", "ending", "bring", "sing", "swing",
                       "sting", "string", "wing", "being"};
    return s;
}

inline const Set& ed_nouns() {
    static const Set s{"need", "bed", "red", "seed", "feed", "speed", "weed", "shed", "sled", "bled",
                       "fled", "shred", "breed", "greed", "deed", "creed", "steed", "tweed", "ted"};
    return s;
}

inline const Set& ly_non_adverbs() {
    static const Set s{"family", "fly", "ugly", "silly", "holy", "reply", "apply", "supply", "belly",
                       "jelly", "rally", "ally", "lily", "bully", "july", "italy", "early", "only", "rely",
                       "curly", "lonely", "lovely", "friendly", "ugly", "jolly", "daily", "monthly"};
    return s;
}

} // namespace lexicon

namespace detail {

inline bool has_alnum(std::string_view s) {
    for (char c : s)
        if (static_cast<unsigned char>(c) >= 0x80 || std::isalnum(static_cast<unsigned char>(c))) return true;
    return false;
}

inline bool is_number(std::string_view w) {
    bool digit = false;
    for (char c : w) {
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digit = true;
        } else if (c != ',' && c != '.') {
            return false;
        }
    }
    return digit;
}

} // namespace detail

/// True for `<word>-ass` compounds such as "random-ass".
inline bool is_ass_compound(std::string_view word) {
    return word.size() > 4 && text::ends_with(word, "-ass") && detail::has_alnum(word.substr(0, word.size() - 4));
}

/// Coarse part-of-speech for one token, from the closed-class lexicon and suffix rules.
inline Pos tag_word(std::string_view lower) {
    if (text::starts_with(lower, ":") && text::ends_with(lower, ":") && lower.size() > 2) return Pos::OTHER;
    if (!detail::has_alnum(lower)) return Pos::PUNCT;
    const std::string w = word_of(lower);
    if (w == "username" && text::starts_with(lower, "@")) return Pos::NOUN;
    if (detail::is_number(w) || lexicon::number_words().contains(w)) return Pos::NUM;
    if (lexicon::pronouns().contains(w)) return Pos::PRON;
    if (lexicon::determiners().contains(w)) return Pos::DET;
    if (lexicon::adpositions().contains(w)) return Pos::ADP;
    if (lexicon::adverbs().contains(w)) return Pos::ADV;
    if (lexicon::other_words().contains(w)) return Pos::OTHER;
    if (lexicon::past_auxiliaries().contains(w) || lexicon::irregular_past().contains(w)) return Pos::VERB_PAST;
    if (lexicon::auxiliaries().contains(w) || lexicon::base_verbs().contains(w)) return Pos::VERB;
    if (lexicon::adjectives().contains(w) || is_ass_compound(w)) return Pos::ADJ;
    if (w.size() >= 5 && (text::ends_with(w, "ing") || text::ends_with(w, "in'")) && !lexicon::ing_nouns().contains(w))
        return Pos::VERB_GER;
    if (w.size() >= 4 && text::ends_with(w, "ed") && !lexicon::ed_nouns().contains(w)) return Pos::VERB_PAST;
    if (w.size() >= 4 && text::ends_with(w, "ly") && !lexicon::ly_non_adverbs().contains(w)) return Pos::ADV;
    if (w.size() >= 6) {
        for (std::string_view suf : {"ful", "ous", "ive", "less", "able", "ible", "ish"})
            if (text::ends_with(w, suf)) return Pos::ADJ;
    }
    return Pos::NOUN;
}

/// Shallow dependency relations: possessive pronoun -> "ass" (POSS/DOBJ) and
/// hyphenated "-ass" compounds (COMPOUND onto the following token).
inline void attach_shallow_dependencies(std::vector<Token>& tokens) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string w = word_of(tokens[i]);
        if (w == "ass" && i > 0 && lexicon::possessive_pronouns().contains(word_of(tokens[i - 1]))) {
            tokens[i - 1].dep = Dep::POSS;
            tokens[i - 1].head = i;
            tokens[i].dep = Dep::DOBJ;
            for (std::size_t k = i - 1; k-- > 0;) {
                const Pos p = tokens[k].pos;
                if (p == Pos::VERB || p == Pos::VERB_PAST || p == Pos::VERB_GER) {
                    tokens[i].head = k;
                    break;
                }
            }
        } else if (is_ass_compound(w)) {
            tokens[i].dep = Dep::COMPOUND;
            if (i + 1 < tokens.size()) tokens[i].head = i + 1;
        }
    }
}

/// Tags a cleaned post with the built-in heuristic tagger.
inline AnnotatedDoc annotate(const CleanPost& post) {
    AnnotatedDoc doc;
    doc.post_id = post.id;
    doc.source = AnnotationSource::internal;
    const auto words = text::split_whitespace(post.text);
    doc.tokens.reserve(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
        Token t;
        t.index = i;
        t.surface = words[i];
        t.lower = normalize_lower(words[i]);
        t.pos = tag_word(t.lower);
        doc.tokens.push_back(std::move(t));
    }
    attach_shallow_dependencies(doc.tokens);
    return doc;
}

/// Convenience for tests and ad-hoc use: annotate a bare string.
inline AnnotatedDoc annotate_text(std::string_view text, std::string post_id = "doc") {
    CleanPost p;
    p.id = std::move(post_id);
    p.text = std::string(text);
    p.token_count = text::split_whitespace(text).size();
    return annotate(p);
}

inline void validate(const AnnotatedDoc& doc) {
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
        const auto& t = doc.tokens[i];
        if (t.index != i) throw ValidationError("doc '" + doc.post_id + "': token indices not contiguous at " + std::to_string(i));
        if (t.head && (*t.head >= doc.tokens.size() || *t.head == i))
            throw ValidationError("doc '" + doc.post_id + "': invalid head for token " + std::to_string(i));
    }
}

/// Serializes docs in the block format read by import_annotations.
inline std::string export_annotations(const std::vector<AnnotatedDoc>& docs) {
    std::ostringstream out;
    for (const auto& doc : docs) {
        out << "#id " << doc.post_id << '\n';
        for (const auto& t : doc.tokens) {
            out << t.index << '\t' << t.surface << '\t' << to_string(t.pos) << '\t'
                << (t.dep ? std::string(to_string(*t.dep)) : "_") << '\t'
                << (t.head ? std::to_string(*t.head) : "_") << '\n';
        }
        out << '\n';
    }
    return out.str();
}

struct AnnotationImport {
    std::map<std::string, AnnotatedDoc> docs;
    std::vector<Diagnostic> diagnostics;
};

/// Parses annotation blocks without corpus checks. Structural problems throw.
inline std::vector<AnnotatedDoc> parse_annotation_blocks(const std::vector<std::string>& lines,
                                                        const std::string& origin,
                                                        std::vector<std::size_t>* header_lines = nullptr) {
    std::vector<AnnotatedDoc> docs;
    std::optional<AnnotatedDoc> current;
    const auto where = [&](std::size_t n) { return origin + ":" + std::to_string(n) + ": "; };
    const auto finish = [&] {
        if (current) docs.push_back(std::move(*current));
        current.reset();
    };
    for (std::size_t n = 1; n <= lines.size(); ++n) {
        const std::string& line = lines[n - 1];
        if (text::trim(line).empty()) {
            finish();
            continue;
        }
        if (text::starts_with(line, "#id ")) {
            finish();
            current = AnnotatedDoc{};
            current->post_id = std::string(text::trim(std::string_view(line).substr(4)));
            current->source = AnnotationSource::imported;
            if (current->post_id.empty()) throw SchemaError(where(n) + "empty post id");
            if (header_lines) header_lines->push_back(n);
            continue;
        }
        if (!current) throw SchemaError(where(n) + "token line outside an '#id' block");
        const auto cols = text::split(line, '\t');
        if (cols.size() != 5) throw SchemaError(where(n) + "expected 5 tab-separated columns");
        Token t;
        const auto idx = text::parse_int(cols[0]);
        if (!idx || *idx < 0) throw SchemaError(where(n) + "bad token index '" + cols[0] + "'");
        t.index = static_cast<std::size_t>(*idx);
        t.surface = cols[1];
        t.lower = normalize_lower(cols[1]);
        const auto pos = parse_pos(cols[2]);
        if (!pos) throw SchemaError(where(n) + "unknown pos tag '" + cols[2] + "'");
        t.pos = *pos;
        if (cols[3] != "_" && cols[3] != "-") {
            const auto dep = parse_dep(cols[3]);
            if (!dep) throw SchemaError(where(n) + "unknown dependency relation '" + cols[3] + "'");
            t.dep = *dep;
        }
        if (cols[4] != "_" && cols[4] != "-") {
            const auto head = text::parse_int(cols[4]);
            if (!head || *head < 0) throw SchemaError(where(n) + "bad head '" + cols[4] + "'");
            t.head = static_cast<std::size_t>(*head);
        }
        current->tokens.push_back(std::move(t));
    }
    finish();
    for (auto& d : docs) {
        try {
            validate(d);
        } catch (const ValidationError& e) {
            throw SchemaError(origin + ": " + e.what());
        }
    }
    return docs;
}

/// Loads externally produced annotations. Ids must belong to the corpus; a doc
/// whose token count disagrees with the corpus is rejected with a diagnostic.
inline AnnotationImport import_annotations(const std::filesystem::path& path, const std::vector<CleanPost>& corpus) {
    std::map<std::string, std::size_t> expected;
    for (const auto& p : corpus) expected[p.id] = p.token_count;
    std::vector<std::size_t> header_lines;
    auto docs = parse_annotation_blocks(io::read_lines(path), path.string(), &header_lines);
    AnnotationImport out;
    for (std::size_t k = 0; k < docs.size(); ++k) {
        auto& doc = docs[k];
        const auto it = expected.find(doc.post_id);
        if (it == expected.end())
            throw ValidationError(path.string() + ":" + std::to_string(header_lines[k]) + ": unknown post id '" + doc.post_id + "'");
        if (doc.tokens.size() != it->second) {
            out.diagnostics.push_back({header_lines[k], "doc '" + doc.post_id + "' has " + std::to_string(doc.tokens.size()) +
                                                            " tokens, corpus has " + std::to_string(it->second) + "; rejected"});
            continue;
        }
        out.docs[doc.post_id] = std::move(doc);
    }
    return out;
}

} // namespace aave
