#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "../error.hpp"

namespace aave::stats {

/// Cohen's kappa for two binary label sequences over the same items.
/// Chance agreement uses each rater's own marginals. When both raters are
/// constant and equal (p_e == 1) kappa is defined as 1.
inline double kappa(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) throw StatsError("kappa: label sequences differ in length");
    if (a.empty()) throw StatsError("kappa: no overlapping items");
    const double n = static_cast<double>(a.size());
    double agree = 0.0;
    double a_pos = 0.0;
    double b_pos = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool x = a[i] != 0;
        const bool y = b[i] != 0;
        agree += x == y ? 1.0 : 0.0;
        a_pos += x ? 1.0 : 0.0;
        b_pos += y ? 1.0 : 0.0;
    }
    const double po = agree / n;
    const double pa = a_pos / n;
    const double pb = b_pos / n;
    const double pe = pa * pb + (1.0 - pa) * (1.0 - pb);
    if (pe >= 1.0) return 1.0;
    return (po - pe) / (1.0 - pe);
}

enum class KappaWeights { linear, quadratic };

/// Weighted kappa for ordinal ratings in [lo, hi].
inline double weighted_kappa(std::span<const int> a, std::span<const int> b, int lo, int hi,
                             KappaWeights weights = KappaWeights::linear) {
    if (a.size() != b.size()) throw StatsError("weighted kappa: label sequences differ in length");
    if (a.empty()) throw StatsError("weighted kappa: no overlapping items");
    if (hi <= lo) throw StatsError("weighted kappa: need at least two categories");
    const int k = hi - lo + 1;
    std::vector<double> obs(static_cast<std::size_t>(k * k), 0.0);
    std::vector<double> ma(static_cast<std::size_t>(k), 0.0), mb(static_cast<std::size_t>(k), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < lo || a[i] > hi || b[i] < lo || b[i] > hi) throw StatsError("weighted kappa: rating out of range");
        const int x = a[i] - lo;
        const int y = b[i] - lo;
        obs[static_cast<std::size_t>(x * k + y)] += 1.0;
        ma[static_cast<std::size_t>(x)] += 1.0;
        mb[static_cast<std::size_t>(y)] += 1.0;
    }
    const double n = static_cast<double>(a.size());
    double po = 0.0;
    double pe = 0.0;
    for (int x = 0; x < k; ++x) {
        for (int y = 0; y < k; ++y) {
            const double d = std::abs(x - y) / static_cast<double>(k - 1);
            const double w = weights == KappaWeights::linear ? 1.0 - d : 1.0 - d * d;
            po += w * obs[static_cast<std::size_t>(x * k + y)] / n;
            pe += w * (ma[static_cast<std::size_t>(x)] / n) * (mb[static_cast<std::size_t>(y)] / n);
        }
    }
    if (pe >= 1.0) return 1.0;
    return (po - pe) / (1.0 - pe);
}

} // namespace aave::stats
