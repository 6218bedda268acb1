#pragma once

#include <algorithm>
#include <filesystem>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "error.hpp"
#include "features.hpp"
#include "stats/descriptive.hpp"

namespace aave {

inline constexpr double kDefaultDdmThreshold = 0.07;

enum class Stratum { high, low };

inline std::string_view to_string(Stratum s) { return s == Stratum::high ? "high" : "low"; }

inline Stratum parse_stratum(std::string_view s) {
    if (s == "high") return Stratum::high;
    if (s == "low") return Stratum::low;
    throw SchemaError("unknown stratum '" + std::string(s) + "'");
}

/// Boundary inclusive: ddm == threshold is high.
inline Stratum classify(double ddm, double threshold = kDefaultDdmThreshold) {
    return ddm >= threshold ? Stratum::high : Stratum::low;
}

/// Raw per-feature densities of one post: count / token_count for detector
/// features, the imported value for `ext:` features.
struct DensityRow {
    std::string post_id;
    std::map<std::string, double> density;
};

inline DensityRow densities(const FeatureVector& fv, const ExternalScores& external = {},
                            const std::set<std::string>& external_features = {}) {
    if (fv.token_count == 0) throw ValidationError("post '" + fv.post_id + "' has no tokens");
    DensityRow row;
    row.post_id = fv.post_id;
    for (const auto& [f, c] : fv.counts) row.density[f] = static_cast<double>(c) / static_cast<double>(fv.token_count);
    const auto it = external.find(fv.post_id);
    for (const auto& f : external_features) {
        if (it == external.end() || !it->second.contains(f))
            throw ValidationError("post '" + fv.post_id + "' has no value for external feature '" + f + "'");
        row.density[f] = it->second.at(f);
    }
    return row;
}

struct FeatureRange {
    double min = 0.0;
    double max = 0.0;
};

struct NormalizationStats {
    std::map<std::string, FeatureRange> ranges;

    std::set<std::string> features() const {
        std::set<std::string> out;
        for (const auto& [f, r] : ranges) out.insert(f);
        return out;
    }
};

/// Per-feature min/max of raw densities over the corpus.
inline NormalizationStats fit_normalizer(const std::vector<DensityRow>& rows) {
    if (rows.empty()) throw ValidationError("cannot fit normalizer on an empty corpus");
    NormalizationStats stats;
    for (const auto& row : rows) {
        for (const auto& [f, d] : row.density) {
            auto [it, inserted] = stats.ranges.try_emplace(f, FeatureRange{d, d});
            if (!inserted) {
                it->second.min = std::min(it->second.min, d);
                it->second.max = std::max(it->second.max, d);
            }
        }
    }
    return stats;
}

inline NormalizationStats fit_normalizer(const std::vector<FeatureVector>& vectors, const ExternalScores& external = {},
                                         const std::set<std::string>& external_features = {}) {
    std::vector<DensityRow> rows;
    rows.reserve(vectors.size());
    for (const auto& fv : vectors) rows.push_back(densities(fv, external, external_features));
    return fit_normalizer(rows);
}

struct DdmScore {
    std::string post_id;
    std::map<std::string, double> normalized;
    double ddm = 0.0;
    Stratum stratum = Stratum::low;
};

/// Min-max normalizes each density (zero-variance features map to 0) and
/// averages over the features present in the row.
inline DdmScore score(const DensityRow& row, const NormalizationStats& stats,
                      double threshold = kDefaultDdmThreshold) {
    if (row.density.empty()) throw ValidationError("post '" + row.post_id + "' has no enabled features");
    DdmScore out;
    out.post_id = row.post_id;
    double sum = 0.0;
    for (const auto& [f, d] : row.density) {
        const auto it = stats.ranges.find(f);
        if (it == stats.ranges.end())
            throw ValidationError("feature '" + f + "' of post '" + row.post_id + "' missing from normalization stats");
        const auto [lo, hi] = it->second;
        const double v = hi > lo ? std::clamp((d - lo) / (hi - lo), 0.0, 1.0) : 0.0;
        out.normalized[f] = v;
        sum += v;
    }
    out.ddm = sum / static_cast<double>(row.density.size());
    out.stratum = classify(out.ddm, threshold);
    return out;
}

inline DdmScore score(const FeatureVector& fv, const NormalizationStats& stats, double threshold = kDefaultDdmThreshold,
                      const ExternalScores& external = {}, const std::set<std::string>& external_features = {}) {
    return score(densities(fv, external, external_features), stats, threshold);
}

struct DemographicCheck {
    stats::Correlation black;
    stats::Correlation white;
};

/// Correlates each post's DDM with its neighborhood's racial composition.
/// `post_demographics` maps post id -> demographic fields (pct_black, pct_white).
inline DemographicCheck ddm_demographic_check(const std::vector<DdmScore>& scores,
                                              const std::map<std::string, std::map<std::string, double>>& post_demographics) {
    std::vector<double> ddm, black, white;
    for (const auto& s : scores) {
        const auto it = post_demographics.find(s.post_id);
        if (it == post_demographics.end()) continue;
        const auto b = it->second.find("pct_black");
        const auto w = it->second.find("pct_white");
        if (b == it->second.end() || w == it->second.end()) continue;
        ddm.push_back(s.ddm);
        black.push_back(b->second);
        white.push_back(w->second);
    }
    if (ddm.size() < 3) throw StatsError("ddm demographic check needs at least 3 geo-joined posts, got " + std::to_string(ddm.size()));
    return {stats::pearson(ddm, black), stats::pearson(ddm, white)};
}

inline nlohmann::json to_json(const DdmScore& s) {
    nlohmann::json j;
    j["post_id"] = s.post_id;
    j["ddm"] = s.ddm;
    j["stratum"] = std::string(to_string(s.stratum));
    j["normalized"] = s.normalized;
    return j;
}

inline DdmScore ddm_score_from_json(const nlohmann::json& j) {
    DdmScore s;
    s.post_id = j.at("post_id").get<std::string>();
    s.ddm = j.at("ddm").get<double>();
    s.stratum = parse_stratum(j.at("stratum").get<std::string>());
    s.normalized = j.at("normalized").get<std::map<std::string, double>>();
    return s;
}

inline nlohmann::json to_json(const NormalizationStats& stats) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [f, r] : stats.ranges) j[f] = {{"min", r.min}, {"max", r.max}};
    return j;
}

inline NormalizationStats normalization_from_json(const nlohmann::json& j) {
    NormalizationStats stats;
    for (const auto& [f, r] : j.items()) {
        FeatureRange range{r.at("min").get<double>(), r.at("max").get<double>()};
        if (range.min > range.max) throw SchemaError("normalization stats for '" + f + "' have min > max");
        stats.ranges[f] = range;
    }
    return stats;
}

/// Reads the line-delimited scores file written by the `ddm` stage.
inline std::vector<DdmScore> load_ddm_scores(const std::filesystem::path& path) {
    std::vector<DdmScore> out;
    std::size_t lineno = 0;
    for (const auto& line : io::read_lines(path)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        try {
            out.push_back(ddm_score_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

} // namespace aave
