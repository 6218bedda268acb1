#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "emoji.hpp"
#include "error.hpp"
#include "util/io.hpp"
#include "util/text.hpp"
#include "util/utf8.hpp"

namespace aave {

struct RawPost {
    std::string id;
    std::string text;
    std::optional<double> latitude;
    std::optional<double> longitude;
    std::optional<std::string> timestamp;
};

struct CleanPost {
    std::string id;
    std::string text;
    std::size_t token_count = 0;
    std::optional<double> latitude;
    std::optional<double> longitude;
    std::optional<std::string> timestamp;

    bool has_coordinates() const { return latitude && longitude; }
};

enum class RejectReason { too_short, contains_link };

inline std::string_view to_string(RejectReason r) {
    return r == RejectReason::too_short ? "too_short" : "contains_link";
}

struct Rejected {
    std::string id;
    RejectReason reason;
};

struct CleanConfig {
    /// Posts with this many tokens or fewer are dropped.
    std::size_t max_short_tokens = 5;
    /// When false, links are stripped instead of rejecting the post.
    bool reject_links = true;
    const EmojiTable* emoji = nullptr;
};

using CleanResult = std::variant<CleanPost, Rejected>;

inline constexpr std::string_view kMentionPlaceholder = "@username";

namespace detail {

inline bool is_handle_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

// Start offsets of `http://`, `https://` or `www.` (case-insensitive).
inline std::vector<std::size_t> link_starts(std::string_view s) {
    const std::string lower = text::to_lower(s);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < lower.size(); ++i) {
        const std::string_view rest = std::string_view(lower).substr(i);
        if (text::starts_with(rest, "http://") || text::starts_with(rest, "https://") ||
            text::starts_with(rest, "www.")) {
            out.push_back(i);
        }
    }
    return out;
}

} // namespace detail

inline bool contains_link(std::string_view s) { return !detail::link_starts(s).empty(); }

/// Rewrites every `@handle` whose `@` is not glued to a preceding word
/// character into the `@username` placeholder.
inline std::string anonymize_mentions(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const bool boundary = i == 0 || !detail::is_handle_char(s[i - 1]);
        if (s[i] == '@' && boundary && i + 1 < s.size() && detail::is_handle_char(s[i + 1])) {
            std::size_t j = i + 1;
            while (j < s.size() && detail::is_handle_char(s[j])) ++j;
            out += kMentionPlaceholder;
            i = j;
            continue;
        }
        out += s[i++];
    }
    return out;
}

/// True when `s` still holds an `@handle` other than the placeholder.
inline bool has_raw_mention(std::string_view s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        const bool boundary = i == 0 || !detail::is_handle_char(s[i - 1]);
        if (s[i] != '@' || !boundary || i + 1 >= s.size() || !detail::is_handle_char(s[i + 1])) continue;
        std::size_t j = i + 1;
        while (j < s.size() && detail::is_handle_char(s[j])) ++j;
        if (s.substr(i, j - i) != kMentionPlaceholder) return true;
    }
    return false;
}

inline std::string strip_links(std::string_view s) {
    std::string out;
    std::size_t i = 0;
    for (std::size_t start : detail::link_starts(s)) {
        if (start < i) continue;
        out.append(s.substr(i, start - i));
        i = start;
        while (i < s.size() && !text::is_space(s[i])) ++i;
    }
    out.append(s.substr(i));
    return out;
}

inline std::string replace_emoji(std::string_view s, const EmojiTable* table) {
    const auto cps = utf8::decode(s);
    std::string out;
    out.reserve(s.size());
    for (char32_t cp : cps) {
        if (table) {
            if (EmojiTable::is_invisible_joiner(cp)) continue;
            if (const auto* name = table->find(cp)) {
                out += ' ';
                out += *name;
                out += ' ';
                continue;
            }
        }
        utf8::append(out, cp);
    }
    return out;
}

/// Applies the cleaning rules: link rejection, mention anonymization, emoji
/// descriptors, whitespace normalization and the short-post rule.
inline CleanResult clean(const RawPost& post, const CleanConfig& cfg = {}) {
    if (post.id.empty()) throw SchemaError("post without id");
    // Decoding first so malformed input is reported even for rejected posts.
    (void)utf8::decode(post.text);

    if (cfg.reject_links && contains_link(post.text)) return Rejected{post.id, RejectReason::contains_link};

    std::string body = cfg.reject_links ? post.text : strip_links(post.text);
    body = anonymize_mentions(body);
    body = replace_emoji(body, cfg.emoji);

    const auto tokens = text::split_whitespace(body);
    if (tokens.size() <= cfg.max_short_tokens) return Rejected{post.id, RejectReason::too_short};

    CleanPost out;
    out.id = post.id;
    out.text = text::join(tokens, " ");
    out.token_count = tokens.size();
    out.latitude = post.latitude;
    out.longitude = post.longitude;
    out.timestamp = post.timestamp;
    return out;
}

struct CorpusLoad {
    std::vector<RawPost> posts;
    std::vector<Diagnostic> diagnostics;
};

namespace detail {

inline std::optional<double> optional_number(const nlohmann::json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) throw SchemaError(std::string("'") + key + "' is not a number");
    return it->get<double>();
}

inline std::optional<std::string> optional_string(const nlohmann::json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw SchemaError(std::string("'") + key + "' is not a string");
    return it->get<std::string>();
}

inline std::string required_string(const nlohmann::json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) throw SchemaError(std::string("missing string '") + key + "'");
    return it->get<std::string>();
}

inline void check_coordinates(const std::optional<double>& lat, const std::optional<double>& lon) {
    if (lat.has_value() != lon.has_value()) throw SchemaError("lat and lon must be given together");
    if (lat && (*lat < -90.0 || *lat > 90.0)) throw SchemaError("lat outside [-90, 90]");
    if (lon && (*lon < -180.0 || *lon > 180.0)) throw SchemaError("lon outside [-180, 180]");
}

} // namespace detail

inline RawPost parse_raw_post(std::string_view line) {
    nlohmann::json obj;
    try {
        obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(std::string("malformed record: ") + e.what());
    }
    if (!obj.is_object()) throw SchemaError("record is not an object");
    RawPost post;
    post.id = detail::required_string(obj, "id");
    if (post.id.empty()) throw SchemaError("empty id");
    post.text = detail::required_string(obj, "text");
    post.latitude = detail::optional_number(obj, "lat");
    post.longitude = detail::optional_number(obj, "lon");
    post.timestamp = detail::optional_string(obj, "ts");
    detail::check_coordinates(post.latitude, post.longitude);
    return post;
}

/// Reads line-delimited post records. Malformed lines become diagnostics;
/// a repeated id is fatal.
inline CorpusLoad load_corpus(const std::filesystem::path& path) {
    CorpusLoad out;
    std::set<std::string> seen;
    std::size_t lineno = 0;
    for (const auto& line : io::read_lines(path)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        RawPost post;
        try {
            post = parse_raw_post(line);
        } catch (const ValidationError& e) {
            out.diagnostics.push_back({lineno, e.what()});
            continue;
        }
        if (!seen.insert(post.id).second)
            throw ValidationError("duplicate post id '" + post.id + "' at line " + std::to_string(lineno));
        out.posts.push_back(std::move(post));
    }
    return out;
}

inline nlohmann::json to_json(const CleanPost& p) {
    nlohmann::json j;
    j["id"] = p.id;
    j["text"] = p.text;
    j["token_count"] = p.token_count;
    if (p.latitude) j["lat"] = *p.latitude;
    if (p.longitude) j["lon"] = *p.longitude;
    if (p.timestamp) j["ts"] = *p.timestamp;
    return j;
}

inline nlohmann::json to_json(const Rejected& r) {
    return {{"id", r.id}, {"reason", std::string(to_string(r.reason))}};
}

/// Reads the cleaned corpus written by the `clean` stage.
inline std::vector<CleanPost> load_clean_corpus(const std::filesystem::path& path) {
    std::vector<CleanPost> out;
    std::set<std::string> seen;
    std::size_t lineno = 0;
    for (const auto& line : io::read_lines(path)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        try {
            const auto obj = nlohmann::json::parse(line);
            CleanPost p;
            p.id = detail::required_string(obj, "id");
            p.text = detail::required_string(obj, "text");
            const auto tc = obj.find("token_count");
            if (tc == obj.end() || !tc->is_number_unsigned()) throw SchemaError("missing token_count");
            p.token_count = tc->get<std::size_t>();
            p.latitude = detail::optional_number(obj, "lat");
            p.longitude = detail::optional_number(obj, "lon");
            p.timestamp = detail::optional_string(obj, "ts");
            if (!seen.insert(p.id).second) throw ValidationError("duplicate post id '" + p.id + "'");
            out.push_back(std::move(p));
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const ValidationError& e) {
            throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

} // namespace aave
