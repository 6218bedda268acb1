#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "corpus.hpp"
#include "error.hpp"
#include "audit.hpp"
#include "stats/descriptive.hpp"
#include "util/io.hpp"
#include "util/text.hpp"

namespace aave::geo {

struct Point {
    double lon = 0.0;
    double lat = 0.0;
    bool operator==(const Point&) const = default;
};

using Ring = std::vector<Point>;

struct BoundingBox {
    double min_lon = std::numeric_limits<double>::infinity();
    double min_lat = std::numeric_limits<double>::infinity();
    double max_lon = -std::numeric_limits<double>::infinity();
    double max_lat = -std::numeric_limits<double>::infinity();

    void extend(const Point& p) {
        min_lon = std::min(min_lon, p.lon);
        min_lat = std::min(min_lat, p.lat);
        max_lon = std::max(max_lon, p.lon);
        max_lat = std::max(max_lat, p.lat);
    }
    bool contains(const Point& p, double eps) const {
        return p.lon >= min_lon - eps && p.lon <= max_lon + eps && p.lat >= min_lat - eps && p.lat <= max_lat + eps;
    }
};

struct Tract {
    std::string geoid;
    std::vector<Ring> rings;
    std::map<std::string, double> demographics;
    BoundingBox bbox;

    void add_ring(Ring ring) {
        if (ring.size() < 4 || ring.front() != ring.back())
            throw SchemaError("tract '" + geoid + "': ring must be closed with at least 4 vertices");
        for (const auto& p : ring) bbox.extend(p);
        rings.push_back(std::move(ring));
    }
};

inline constexpr double kBoundaryEps = 1e-12;

inline bool on_segment(const Point& p, const Point& a, const Point& b, double eps = kBoundaryEps) {
    const double cross = (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
    const double len = std::hypot(b.lon - a.lon, b.lat - a.lat);
    if (std::fabs(cross) > eps * std::max(len, 1.0)) return false;
    return p.lon >= std::min(a.lon, b.lon) - eps && p.lon <= std::max(a.lon, b.lon) + eps &&
           p.lat >= std::min(a.lat, b.lat) - eps && p.lat <= std::max(a.lat, b.lat) + eps;
}

inline bool on_boundary(const Point& p, const Tract& t) {
    for (const auto& ring : t.rings)
        for (std::size_t i = 0; i + 1 < ring.size(); ++i)
            if (on_segment(p, ring[i], ring[i + 1])) return true;
    return false;
}

/// Even-odd ray casting over all rings (holes and multi-part tracts included).
inline bool inside_even_odd(const Point& p, const Tract& t) {
    bool inside = false;
    for (const auto& ring : t.rings) {
        for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
            const Point& a = ring[i];
            const Point& b = ring[j];
            if ((a.lat > p.lat) != (b.lat > p.lat)) {
                const double x = (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon;
                if (p.lon < x) inside = !inside;
            }
        }
    }
    return inside;
}

/// First tract (in file order) containing the point; boundary points count as contained.
inline std::optional<std::string> locate(const Point& p, const std::vector<Tract>& tracts) {
    for (const auto& t : tracts) {
        if (!t.bbox.contains(p, kBoundaryEps)) continue;
        if (on_boundary(p, t) || inside_even_odd(p, t)) return t.geoid;
    }
    return std::nullopt;
}

inline std::optional<std::string> locate(const CleanPost& post, const std::vector<Tract>& tracts) {
    if (!post.has_coordinates()) return std::nullopt;
    return locate(Point{*post.longitude, *post.latitude}, tracts);
}

namespace detail {

inline Ring parse_ring(const nlohmann::json& coords) {
    Ring ring;
    for (const auto& v : coords) {
        if (!v.is_array() || v.size() < 2) throw SchemaError("vertex is not a [lon, lat] pair");
        ring.push_back({v[0].get<double>(), v[1].get<double>()});
    }
    return ring;
}

inline std::string geoid_of(const nlohmann::json& props) {
    const auto it = props.find("GEOID");
    if (it == props.end()) throw SchemaError("feature without GEOID property");
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<long long>());
    throw SchemaError("GEOID must be a string or integer");
}

} // namespace detail

/// Reads a GeoJSON FeatureCollection of Polygon / MultiPolygon tracts.
inline std::vector<Tract> parse_tracts(const nlohmann::json& doc) {
    if (doc.value("type", "") != "FeatureCollection") throw SchemaError("tract file is not a FeatureCollection");
    std::vector<Tract> out;
    std::set<std::string> seen;
    for (const auto& f : doc.at("features")) {
        Tract t;
        t.geoid = detail::geoid_of(f.at("properties"));
        if (!seen.insert(t.geoid).second) throw SchemaError("duplicate tract GEOID '" + t.geoid + "'");
        const auto& g = f.at("geometry");
        const std::string type = g.at("type").get<std::string>();
        if (type == "Polygon") {
            for (const auto& r : g.at("coordinates")) t.add_ring(detail::parse_ring(r));
        } else if (type == "MultiPolygon") {
            for (const auto& poly : g.at("coordinates"))
                for (const auto& r : poly) t.add_ring(detail::parse_ring(r));
        } else {
            throw SchemaError("tract '" + t.geoid + "' has unsupported geometry '" + type + "'");
        }
        out.push_back(std::move(t));
    }
    return out;
}

inline std::vector<Tract> load_tracts(const std::filesystem::path& path) {
    try {
        return parse_tracts(nlohmann::json::parse(io::read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

/// Attaches the demographics table (CSV keyed by a GEOID column) to the tracts.
inline void attach_demographics(std::vector<Tract>& tracts, const std::string& csv) {
    const auto rows = io::parse_csv(csv);
    if (rows.empty()) throw SchemaError("empty demographics table");
    const auto& header = rows.front();
    std::size_t key = header.size();
    for (std::size_t i = 0; i < header.size(); ++i)
        if (text::to_lower(header[i]) == "geoid") key = i;
    if (key == header.size()) throw SchemaError("demographics table has no GEOID column");
    std::map<std::string, std::map<std::string, double>> by_geoid;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size()) throw SchemaError("demographics row " + std::to_string(r + 1) + " has wrong width");
        auto& fields = by_geoid[row[key]];
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i == key) continue;
            const auto v = text::parse_double(row[i]);
            if (!v) throw SchemaError("demographics row " + std::to_string(r + 1) + ": non-numeric '" + header[i] + "'");
            if (text::starts_with(header[i], "pct_") && (*v < 0.0 || *v > 100.0))
                throw SchemaError("demographics row " + std::to_string(r + 1) + ": " + header[i] + " outside [0,100]");
            fields[header[i]] = *v;
        }
    }
    for (auto& t : tracts) {
        const auto it = by_geoid.find(t.geoid);
        if (it != by_geoid.end()) t.demographics = it->second;
    }
}

struct Neighborhood {
    std::string name;
    std::set<std::string> tract_geoids;
    std::map<std::string, double> demographics;
    std::size_t post_count = 0;
};

/// Reads `neighborhood,geoid` rows (header first); a tract may belong to one neighborhood only.
inline std::map<std::string, Neighborhood> parse_neighborhoods(const std::string& csv) {
    const auto rows = io::parse_csv(csv);
    std::map<std::string, Neighborhood> out;
    std::map<std::string, std::string> owner;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 2) throw SchemaError("neighborhood row " + std::to_string(r + 1) + " needs 2 columns");
        const auto& name = rows[r][0];
        const auto& geoid = rows[r][1];
        const auto [it, fresh] = owner.emplace(geoid, name);
        if (!fresh && it->second != name)
            throw SchemaError("tract '" + geoid + "' assigned to both '" + it->second + "' and '" + name + "'");
        auto& n = out[name];
        n.name = name;
        n.tract_geoids.insert(geoid);
    }
    return out;
}

/// Population-weighted demographics per neighborhood (unweighted when a tract lacks population).
inline void aggregate_demographics(std::map<std::string, Neighborhood>& hoods, const std::vector<Tract>& tracts) {
    std::map<std::string, const Tract*> by_id;
    for (const auto& t : tracts) by_id[t.geoid] = &t;
    for (auto& [name, hood] : hoods) {
        std::map<std::string, std::pair<double, double>> acc;
        double population = 0.0;
        for (const auto& g : hood.tract_geoids) {
            const auto it = by_id.find(g);
            if (it == by_id.end() || it->second->demographics.empty()) continue;
            const auto& d = it->second->demographics;
            const auto pop = d.find("population");
            const double w = pop != d.end() ? pop->second : 1.0;
            if (pop != d.end()) population += pop->second;
            for (const auto& [field, v] : d) {
                if (field == "population") continue;
                acc[field].first += w * v;
                acc[field].second += w;
            }
        }
        hood.demographics.clear();
        for (const auto& [field, s] : acc)
            if (s.second > 0.0) hood.demographics[field] = s.first / s.second;
        if (population > 0.0) hood.demographics["population"] = population;
    }
}

struct GeoJoin {
    /// post -> tract geoid
    std::map<std::string, std::string> tract_of;
    /// post -> neighborhood
    std::map<std::string, std::string> neighborhood_of;
    std::size_t without_coordinates = 0;
    std::size_t unlocated = 0;
    /// Located posts whose tract has no neighborhood.
    std::size_t outside_neighborhoods = 0;
};

inline GeoJoin join_posts(const std::vector<CleanPost>& posts, const std::vector<Tract>& tracts,
                          std::map<std::string, Neighborhood>& hoods) {
    std::map<std::string, std::string> hood_of_tract;
    for (auto& [name, h] : hoods) {
        h.post_count = 0;
        for (const auto& g : h.tract_geoids) hood_of_tract[g] = name;
    }
    GeoJoin out;
    for (const auto& p : posts) {
        if (!p.has_coordinates()) {
            ++out.without_coordinates;
            continue;
        }
        const auto geoid = locate(p, tracts);
        if (!geoid) {
            ++out.unlocated;
            continue;
        }
        out.tract_of[p.id] = *geoid;
        const auto h = hood_of_tract.find(*geoid);
        if (h == hood_of_tract.end()) {
            ++out.outside_neighborhoods;
            continue;
        }
        out.neighborhood_of[p.id] = h->second;
        ++hoods[h->second].post_count;
    }
    return out;
}

/// Post -> demographic fields of the post's tract.
inline std::map<std::string, std::map<std::string, double>> post_demographics(const GeoJoin& join,
                                                                              const std::vector<Tract>& tracts) {
    std::map<std::string, const Tract*> by_id;
    for (const auto& t : tracts) by_id[t.geoid] = &t;
    std::map<std::string, std::map<std::string, double>> out;
    for (const auto& [post, geoid] : join.tract_of) {
        const auto it = by_id.find(geoid);
        if (it != by_id.end() && !it->second->demographics.empty()) out[post] = it->second->demographics;
    }
    return out;
}

inline constexpr std::size_t kDefaultMinPosts = 30;

struct NeighborhoodProbabilities {
    std::map<std::string, double> probability;
    std::map<std::string, std::size_t> posts;
    /// Neighborhoods below the post floor.
    std::vector<std::string> excluded;
};

/// P(emotion | neighborhood, model): mean binary prediction over the
/// neighborhood's non-refused posts.
inline NeighborhoodProbabilities neighborhood_emotion_prob(const SystemPredictions& preds,
                                                           const std::map<std::string, std::string>& neighborhood_of,
                                                           Emotion emotion, std::size_t min_posts = kDefaultMinPosts,
                                                           const std::set<std::string>& all_neighborhoods = {}) {
    std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
    for (const auto& n : all_neighborhoods) counts[n];
    for (const auto& [post, hood] : neighborhood_of) {
        const auto it = preds.find(post);
        if (it == preds.end() || !it->second) continue;
        auto& c = counts[hood];
        c.second += 1;
        if (it->second->contains(emotion)) c.first += 1;
    }
    NeighborhoodProbabilities out;
    for (const auto& [hood, c] : counts) {
        if (c.second == 0 || c.second < min_posts) {
            out.excluded.push_back(hood);
            continue;
        }
        out.probability[hood] = double(c.first) / double(c.second);
        out.posts[hood] = c.second;
    }
    return out;
}

/// Pearson correlation across neighborhoods between emotion probability and one demographic field.
inline stats::Correlation demographic_correlation(const std::map<std::string, double>& probability,
                                                  const std::map<std::string, Neighborhood>& hoods,
                                                  const std::string& field) {
    std::vector<double> x, y;
    for (const auto& [name, p] : probability) {
        const auto h = hoods.find(name);
        if (h == hoods.end()) continue;
        const auto d = h->second.demographics.find(field);
        if (d == h->second.demographics.end()) continue;
        x.push_back(p);
        y.push_back(d->second);
    }
    if (x.size() < 3) throw StatsError("demographic correlation needs at least 3 neighborhoods with '" + field + "'");
    return stats::pearson(x, y);
}

/// Published median correlations (emotion probability vs. percent Black), for side-by-side reporting.
inline std::optional<double> reference_median(Emotion e, const std::string& field) {
    if (field != "pct_black") return std::nullopt;
    if (e == Emotion::anger) return 0.27;
    if (e == Emotion::joy) return -0.10;
    return std::nullopt;
}

} // namespace aave::geo
