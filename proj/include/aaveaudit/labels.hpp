#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "annotate.hpp"
#include "ddm.hpp"
#include "error.hpp"
#include "taxonomy.hpp"
#include "util/io.hpp"

namespace aave {

enum class Group { ingroup, outgroup };

inline std::string_view to_string(Group g) { return g == Group::ingroup ? "ingroup" : "outgroup"; }

inline Group parse_group(std::string_view s) {
    if (s == "ingroup") return Group::ingroup;
    if (s == "outgroup") return Group::outgroup;
    throw SchemaError("unknown annotator group '" + std::string(s) + "'");
}

/// One annotator's 1-3 rating of one emotion on one post
/// (1 = absent, 2 = slight presence, 3 = strong presence).
struct Annotation {
    std::string post_id;
    std::string annotator_id;
    Group group = Group::outgroup;
    Emotion emotion = Emotion::joy;
    int intensity = 1;
};

/// An individual rating counts as a positive label at slight presence or above.
inline bool rated_present(int intensity) { return intensity >= 2; }

inline std::vector<Annotation> load_annotations(const std::filesystem::path& path) {
    std::vector<Annotation> out;
    std::set<std::tuple<std::string, std::string, Emotion>> seen;
    std::size_t lineno = 0;
    for (const auto& line : io::read_lines(path)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(lineno) + ": ";
        try {
            const auto j = nlohmann::json::parse(line);
            const auto post = j.at("post_id").get<std::string>();
            const auto annotator = j.at("annotator_id").get<std::string>();
            const Group group = parse_group(j.at("group").get<std::string>());
            for (const auto& [name, value] : j.at("labels").items()) {
                const Emotion e = require_emotion(name);
                if (e == Emotion::neutral) throw SchemaError("neutral is not an annotated emotion");
                if (!value.is_number_integer()) throw SchemaError("intensity for '" + name + "' is not an integer");
                const int v = value.get<int>();
                if (v < 1 || v > 3) throw SchemaError("intensity " + std::to_string(v) + " outside {1,2,3}");
                if (!seen.emplace(post, annotator, e).second)
                    throw SchemaError("duplicate rating of '" + name + "' by '" + annotator + "' on '" + post + "'");
                out.push_back({post, annotator, group, e, v});
            }
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(where + e.what());
        } catch (const ValidationError& e) {
            throw SchemaError(where + e.what());
        }
    }
    return out;
}

/// Presence rule: at least two eligible ratings of 2, or any rating of 3.
inline bool presence(std::span<const int> intensities) {
    if (intensities.empty()) throw ValidationError("presence needs at least one eligible rating");
    const auto twos = std::count(intensities.begin(), intensities.end(), 2);
    const bool any_three = std::find(intensities.begin(), intensities.end(), 3) != intensities.end();
    return twos >= 2 || any_three;
}

/// Most frequent rating; ties resolve to the mean of the tied values (so a
/// 1-vs-3 split lands on 2).
inline double intensity_mode(std::span<const int> intensities) {
    if (intensities.empty()) throw ValidationError("mode of no ratings");
    std::map<int, int> freq;
    for (int v : intensities) ++freq[v];
    int best = 0;
    for (const auto& [v, c] : freq) best = std::max(best, c);
    double sum = 0.0;
    int tied = 0;
    for (const auto& [v, c] : freq) {
        if (c == best) {
            sum += v;
            ++tied;
        }
    }
    return sum / tied;
}

enum class EligibleGroup { ingroup_only, all };

inline std::string_view to_string(EligibleGroup g) { return g == EligibleGroup::ingroup_only ? "ingroup_only" : "all"; }

struct SilverLabel {
    std::string post_id;
    Emotion emotion = Emotion::joy;
    bool present = false;
    double intensity_mode = 1.0;
    EligibleGroup eligible_group = EligibleGroup::all;
    std::size_t n_annotators = 0;
    Stratum stratum = Stratum::low;
};

struct DisagreementCount {
    std::size_t posts = 0;
    std::size_t markers = 0;
};

struct SilverResult {
    std::vector<SilverLabel> labels;
    /// High-stratum posts without any ingroup rating.
    std::vector<std::string> excluded_no_ingroup;
    /// Annotated posts with no DDM score.
    std::vector<std::string> excluded_no_score;
    /// (post, emotion) cells holding both a 1 and a 3, over all raters and over eligible raters.
    DisagreementCount extreme_before_gating;
    DisagreementCount extreme_after_gating;
};

/// Community-informed silver labels: high-stratum posts are judged by ingroup
/// annotators only, all other posts by every annotator.
inline SilverResult silver(const std::vector<Annotation>& annotations, const std::vector<DdmScore>& scores) {
    std::map<std::string, Stratum> stratum;
    for (const auto& s : scores) stratum[s.post_id] = s.stratum;

    std::map<std::string, std::vector<const Annotation*>> by_post;
    for (const auto& a : annotations) by_post[a.post_id].push_back(&a);

    SilverResult out;
    const auto extreme = [](const std::vector<int>& v) {
        return std::find(v.begin(), v.end(), 1) != v.end() && std::find(v.begin(), v.end(), 3) != v.end();
    };
    for (const auto& [post, anns] : by_post) {
        const auto st = stratum.find(post);
        if (st == stratum.end()) {
            out.excluded_no_score.push_back(post);
            continue;
        }
        const bool high = st->second == Stratum::high;
        const bool has_ingroup = std::any_of(anns.begin(), anns.end(), [](const Annotation* a) { return a->group == Group::ingroup; });

        bool before_post = false;
        bool after_post = false;
        for (Emotion e : kPrimaryEmotions) {
            std::vector<int> all, eligible;
            for (const Annotation* a : anns) {
                if (a->emotion != e) continue;
                all.push_back(a->intensity);
                if (!high || a->group == Group::ingroup) eligible.push_back(a->intensity);
            }
            if (extreme(all)) {
                ++out.extreme_before_gating.markers;
                before_post = true;
            }
            if (high && !has_ingroup) continue;
            if (extreme(eligible)) {
                ++out.extreme_after_gating.markers;
                after_post = true;
            }
            if (eligible.empty()) continue;
            SilverLabel l;
            l.post_id = post;
            l.emotion = e;
            l.present = presence(eligible);
            l.intensity_mode = intensity_mode(eligible);
            l.eligible_group = high ? EligibleGroup::ingroup_only : EligibleGroup::all;
            l.n_annotators = eligible.size();
            l.stratum = st->second;
            out.labels.push_back(std::move(l));
        }
        if (before_post) ++out.extreme_before_gating.posts;
        if (after_post) ++out.extreme_after_gating.posts;
        if (high && !has_ingroup) out.excluded_no_ingroup.push_back(post);
    }
    return out;
}

inline nlohmann::json to_json(const SilverLabel& l) {
    return {{"post_id", l.post_id},
            {"emotion", std::string(to_string(l.emotion))},
            {"present", l.present},
            {"intensity_mode", l.intensity_mode},
            {"eligible_group", std::string(to_string(l.eligible_group))},
            {"n_annotators", l.n_annotators},
            {"stratum", std::string(to_string(l.stratum))}};
}

inline std::vector<SilverLabel> load_silver(const std::filesystem::path& path) {
    std::vector<SilverLabel> out;
    std::size_t lineno = 0;
    for (const auto& line : io::read_lines(path)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            SilverLabel l;
            l.post_id = j.at("post_id").get<std::string>();
            l.emotion = require_emotion(j.at("emotion").get<std::string>());
            l.present = j.at("present").get<bool>();
            l.intensity_mode = j.at("intensity_mode").get<double>();
            l.eligible_group = j.at("eligible_group").get<std::string>() == "ingroup_only" ? EligibleGroup::ingroup_only
                                                                                          : EligibleGroup::all;
            l.n_annotators = j.at("n_annotators").get<std::size_t>();
            l.stratum = parse_stratum(j.at("stratum").get<std::string>());
            out.push_back(std::move(l));
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const ValidationError& e) {
            throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

enum class PromptSchema { zero, few, cot, none };

inline std::string_view to_string(PromptSchema s) {
    switch (s) {
    case PromptSchema::zero: return "zero";
    case PromptSchema::few: return "few";
    case PromptSchema::cot: return "cot";
    case PromptSchema::none: return "none";
    }
    return "none";
}

inline PromptSchema parse_prompt_schema(std::string_view s) {
    if (s == "zero") return PromptSchema::zero;
    if (s == "few") return PromptSchema::few;
    if (s == "cot") return PromptSchema::cot;
    if (s == "none") return PromptSchema::none;
    throw SchemaError("unknown prompt schema '" + std::string(s) + "'");
}

/// One model's output for one post: soft scores, a hard label set, or a refusal.
struct Prediction {
    std::string post_id;
    std::string model_id;
    PromptSchema prompt_schema = PromptSchema::none;
    std::optional<std::map<Emotion, double>> scores;
    std::optional<std::set<Emotion>> labels;
    bool refusal = false;

    /// Generative models are evaluated per prompt schema.
    std::string system_id() const {
        return prompt_schema == PromptSchema::none ? model_id : model_id + "/" + std::string(to_string(prompt_schema));
    }
};

inline constexpr double kDefaultScoreThreshold = 0.05;

/// Emotions predicted present, or nullopt for a refusal (excluded from
/// confusion counts). Soft scores count at or above `t`.
inline std::optional<std::set<Emotion>> threshold_predictions(const Prediction& pred, double t = kDefaultScoreThreshold) {
    if (pred.refusal) return std::nullopt;
    if (pred.labels) return *pred.labels;
    std::set<Emotion> out;
    if (pred.scores)
        for (const auto& [e, s] : *pred.scores)
            if (s >= t && s > 0.0 && e != Emotion::neutral) out.insert(e);
    return out;
}

namespace detail {

inline Emotion resolve_emotion(const std::string& name, const TaxonomyMap* tax) {
    if (const auto e = parse_emotion(name)) return *e;
    if (tax) return tax->map_label(name);
    throw ValidationError("unknown emotion '" + name + "'");
}

} // namespace detail

/// Parses one prediction record. Non-primary emotion names are mapped through
/// `tax` when given; several source labels landing on one primary keep the max score.
inline Prediction parse_prediction(const nlohmann::json& j, const TaxonomyMap* tax = nullptr) {
    Prediction p;
    p.post_id = j.at("post_id").get<std::string>();
    p.model_id = j.at("model_id").get<std::string>();
    if (p.post_id.empty() || p.model_id.empty()) throw SchemaError("empty post_id or model_id");
    p.prompt_schema = parse_prompt_schema(j.value("prompt_schema", std::string("none")));
    p.refusal = j.value("refusal", false);
    const bool has_scores = j.contains("scores") && !j.at("scores").is_null();
    const bool has_labels = j.contains("labels") && !j.at("labels").is_null();
    if (has_scores && has_labels) throw SchemaError("record has both scores and labels");
    if (has_scores) {
        std::map<Emotion, double> scores;
        for (const auto& [name, v] : j.at("scores").items()) {
            const double s = v.get<double>();
            if (!(s >= 0.0 && s <= 1.0)) throw SchemaError("score for '" + name + "' outside [0,1]");
            const Emotion e = detail::resolve_emotion(name, tax);
            auto [it, inserted] = scores.try_emplace(e, s);
            if (!inserted) it->second = std::max(it->second, s);
        }
        p.scores = std::move(scores);
    } else if (has_labels) {
        std::set<Emotion> labels;
        for (const auto& name : j.at("labels")) labels.insert(detail::resolve_emotion(name.get<std::string>(), tax));
        p.labels = std::move(labels);
    } else if (!p.refusal) {
        throw SchemaError("record has neither scores nor labels");
    }
    if (p.refusal && ((p.scores && !p.scores->empty()) || (p.labels && !p.labels->empty())))
        throw SchemaError("refusal record carries predictions");
    return p;
}

inline std::vector<Prediction> load_predictions(const std::filesystem::path& path, const TaxonomyMap* tax = nullptr) {
    std::vector<Prediction> out;
    std::set<std::pair<std::string, std::string>> seen;
    std::size_t lineno = 0;
    for (const auto& line : io::read_lines(path)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(lineno) + ": ";
        try {
            auto p = parse_prediction(nlohmann::json::parse(line), tax);
            if (!seen.emplace(p.system_id(), p.post_id).second)
                throw SchemaError("duplicate prediction for '" + p.post_id + "' by '" + p.system_id() + "'");
            out.push_back(std::move(p));
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(where + e.what());
        } catch (const ValidationError& e) {
            throw SchemaError(where + e.what());
        }
    }
    return out;
}

inline nlohmann::json to_json(const Prediction& p) {
    nlohmann::json j;
    j["post_id"] = p.post_id;
    j["model_id"] = p.model_id;
    j["prompt_schema"] = std::string(to_string(p.prompt_schema));
    j["refusal"] = p.refusal;
    if (p.scores) {
        nlohmann::json s = nlohmann::json::object();
        for (const auto& [e, v] : *p.scores) s[std::string(to_string(e))] = v;
        j["scores"] = s;
    }
    if (p.labels) {
        nlohmann::json l = nlohmann::json::array();
        for (Emotion e : *p.labels) l.push_back(std::string(to_string(e)));
        j["labels"] = l;
    }
    return j;
}

/// Word -> emotions flagged 1 in the NRC word-emotion association file.
class NrcLexicon {
public:
    static NrcLexicon load(const std::filesystem::path& path) {
        NrcLexicon lex;
        std::size_t lineno = 0;
        for (const auto& line : io::read_lines(path)) {
            ++lineno;
            if (text::trim(line).empty() || line.front() == '#') continue;
            const auto cols = text::split(line, '\t');
            const std::string where = path.string() + ":" + std::to_string(lineno) + ": ";
            if (cols.size() != 3) throw SchemaError(where + "expected word<TAB>emotion<TAB>0|1");
            if (cols[2] != "0" && cols[2] != "1") throw SchemaError(where + "flag must be 0 or 1");
            if (cols[2] == "1") lex.add(text::to_lower(cols[0]), cols[1]);
        }
        lex.hash_ = hash_file(path.string());
        return lex;
    }

    void add(const std::string& word, const std::string& emotion) { flags_[word].insert(emotion); }

    const std::set<std::string>* find(const std::string& word) const {
        const auto it = flags_.find(word);
        return it == flags_.end() ? nullptr : &it->second;
    }

    std::size_t size() const { return flags_.size(); }
    const std::string& hash() const { return hash_; }

private:
    std::map<std::string, std::set<std::string>> flags_;
    std::string hash_;
};

/// The lexicon's sentiment columns are not emotions and are skipped.
inline bool is_nrc_sentiment(std::string_view name) { return name == "positive" || name == "negative"; }

/// score[e] = (tokens flagged for any source emotion mapping to e) / token_count.
inline Prediction nrc_score(const AnnotatedDoc& doc, const NrcLexicon& lexicon, const TaxonomyMap& tax) {
    Prediction p;
    p.post_id = doc.post_id;
    p.model_id = "nrc";
    p.prompt_schema = PromptSchema::none;
    std::map<Emotion, double> scores;
    for (Emotion e : kPrimaryEmotions) scores[e] = 0.0;
    if (!doc.tokens.empty()) {
        std::map<Emotion, std::size_t> hits;
        for (const auto& t : doc.tokens) {
            const auto* flagged = lexicon.find(word_of(t));
            if (!flagged) continue;
            std::set<Emotion> primaries;
            for (const auto& src : *flagged)
                if (!is_nrc_sentiment(src)) primaries.insert(tax.map_label(src));
            for (Emotion e : primaries) ++hits[e];
        }
        for (const auto& [e, n] : hits)
            if (e != Emotion::neutral) scores[e] = static_cast<double>(n) / static_cast<double>(doc.tokens.size());
    }
    p.scores = std::move(scores);
    return p;
}

} // namespace aave
