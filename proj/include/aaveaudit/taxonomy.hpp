#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "error.hpp"
#include "util/hash.hpp"
#include "util/io.hpp"
#include "util/text.hpp"

namespace aave {

enum class Emotion { love, joy, surprise, anger, sadness, fear, disgust, neutral };

inline constexpr std::array<Emotion, 8> kAllEmotions{Emotion::love,    Emotion::joy,  Emotion::surprise,
                                                     Emotion::anger,   Emotion::sadness, Emotion::fear,
                                                     Emotion::disgust, Emotion::neutral};

/// The seven annotated emotions (neutral excluded).
inline constexpr std::array<Emotion, 7> kPrimaryEmotions{Emotion::love,    Emotion::joy,  Emotion::surprise,
                                                         Emotion::anger,   Emotion::sadness, Emotion::fear,
                                                         Emotion::disgust};

inline std::string_view to_string(Emotion e) {
    switch (e) {
    case Emotion::love: return "love";
    case Emotion::joy: return "joy";
    case Emotion::surprise: return "surprise";
    case Emotion::anger: return "anger";
    case Emotion::sadness: return "sadness";
    case Emotion::fear: return "fear";
    case Emotion::disgust: return "disgust";
    case Emotion::neutral: return "neutral";
    }
    return "neutral";
}

inline std::optional<Emotion> parse_emotion(std::string_view s) {
    for (Emotion e : kAllEmotions)
        if (to_string(e) == s) return e;
    return std::nullopt;
}

inline Emotion require_emotion(std::string_view s) {
    if (const auto e = parse_emotion(s)) return *e;
    throw ValidationError("unknown primary emotion '" + std::string(s) + "'");
}

struct TaxonomyEntry {
    Emotion primary;
    std::string framework;
};

/// Source-framework label -> primary emotion.
class TaxonomyMap {
public:
    void add(const std::string& label, Emotion primary, std::string framework) {
        if (!entries_.emplace(label, TaxonomyEntry{primary, std::move(framework)}).second)
            throw ValidationError("duplicate taxonomy label '" + label + "'");
    }

    Emotion map_label(std::string_view label) const {
        const auto it = entries_.find(std::string(label));
        if (it == entries_.end()) throw ValidationError("label '" + std::string(label) + "' not in taxonomy");
        return it->second.primary;
    }

    bool contains(std::string_view label) const { return entries_.contains(std::string(label)); }
    std::size_t size() const { return entries_.size(); }
    const std::map<std::string, TaxonomyEntry>& entries() const { return entries_; }

    /// Hash of the source file (empty for programmatic maps).
    const std::string& hash() const { return hash_; }
    void set_hash(std::string h) { hash_ = std::move(h); }

private:
    std::map<std::string, TaxonomyEntry> entries_;
    std::string hash_;
};

inline Emotion map_label(std::string_view label, const TaxonomyMap& tax) { return tax.map_label(label); }

/// Parses `source_label<TAB>primary<TAB>framework` lines ('#' comments allowed).
inline TaxonomyMap parse_taxonomy(const std::string& contents, const std::string& origin = "<taxonomy>") {
    TaxonomyMap tax;
    std::size_t lineno = 0;
    for (std::string line : text::split(contents, '\n')) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty() || line.front() == '#') continue;
        const std::string where = origin + ":" + std::to_string(lineno) + ": ";
        const auto cols = text::split(line, '\t');
        if (cols.size() != 3 || cols[0].empty()) throw SchemaError(where + "expected label<TAB>primary<TAB>framework");
        const auto primary = parse_emotion(cols[1]);
        if (!primary) throw ValidationError(where + "unknown primary emotion '" + cols[1] + "'");
        try {
            tax.add(cols[0], *primary, cols[2]);
        } catch (const ValidationError& e) {
            throw ValidationError(where + e.what());
        }
    }
    tax.set_hash(hash_string(contents));
    return tax;
}

inline TaxonomyMap load_taxonomy(const std::filesystem::path& path) {
    return parse_taxonomy(io::read_file(path), path.string());
}

} // namespace aave
