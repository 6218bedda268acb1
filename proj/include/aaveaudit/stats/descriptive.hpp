#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "../error.hpp"
#include "special.hpp"

namespace aave::stats {

struct Correlation {
    double r = 0.0;
    double p = 1.0;
    std::size_t n = 0;
};

inline double mean(std::span<const double> xs) {
    if (xs.empty()) throw StatsError("mean of empty series");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

/// Sample Pearson correlation with a two-sided t-test p-value (n - 2 df).
inline Correlation pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw StatsError("pearson: series lengths differ");
    const std::size_t n = x.size();
    if (n < 3) throw StatsError("pearson: need at least 3 observations");
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw StatsError("pearson: constant series");
    double r = sxy / std::sqrt(sxx * syy);
    r = std::clamp(r, -1.0, 1.0);
    const double df = static_cast<double>(n - 2);
    double p = 0.0;
    if (std::fabs(r) < 1.0) {
        const double t = r * std::sqrt(df / (1.0 - r * r));
        p = student_t_two_sided(t, df);
    }
    return {r, p, n};
}

/// Base-2 Jensen-Shannon divergence of two non-negative weight vectors,
/// each renormalized to sum 1. Result lies in [0, 1].
inline double jsd(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw StatsError("jsd: vector lengths differ");
    const auto total = [](std::span<const double> v) {
        double s = 0.0;
        for (double x : v) {
            if (x < 0.0 || !std::isfinite(x)) throw StatsError("jsd: weights must be finite and non-negative");
            s += x;
        }
        if (s == 0.0) throw StatsError("jsd: all-zero vector");
        return s;
    };
    const double sp = total(p);
    const double sq = total(q);
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi = p[i] / sp;
        const double qi = q[i] / sq;
        const double mi = 0.5 * (pi + qi);
        if (pi > 0.0) d += 0.5 * pi * std::log2(pi / mi);
        if (qi > 0.0) d += 0.5 * qi * std::log2(qi / mi);
    }
    return std::clamp(d, 0.0, 1.0);
}

struct AnovaResult {
    double f = 0.0;
    double p = 1.0;
    double df_between = 0.0;
    double df_within = 0.0;
    double ss_between = 0.0;
    double ss_within = 0.0;
};

/// One-way ANOVA over `groups` (each a list of observations).
inline AnovaResult anova(const std::vector<std::vector<double>>& groups) {
    std::size_t k = 0;
    std::size_t n = 0;
    double grand = 0.0;
    for (const auto& g : groups) {
        if (g.empty()) throw StatsError("anova: empty group");
        ++k;
        n += g.size();
        grand += std::accumulate(g.begin(), g.end(), 0.0);
    }
    if (k < 2) throw StatsError("anova: need at least two groups");
    if (n <= k) throw StatsError("anova: not enough observations");
    grand /= static_cast<double>(n);
    AnovaResult out;
    for (const auto& g : groups) {
        const double m = mean(g);
        out.ss_between += static_cast<double>(g.size()) * (m - grand) * (m - grand);
        for (double v : g) out.ss_within += (v - m) * (v - m);
    }
    if (out.ss_within == 0.0) throw StatsError("anova: zero within-group variance");
    out.df_between = static_cast<double>(k - 1);
    out.df_within = static_cast<double>(n - k);
    out.f = (out.ss_between / out.df_between) / (out.ss_within / out.df_within);
    out.p = f_upper_tail(out.f, out.df_between, out.df_within);
    return out;
}

/// Two-group convenience: binary labels split by a group flag.
inline AnovaResult anova_group_test(std::span<const double> labels, std::span<const int> group) {
    if (labels.size() != group.size()) throw StatsError("anova: labels and groups differ in length");
    std::map<int, std::vector<double>> by_group;
    for (std::size_t i = 0; i < labels.size(); ++i) by_group[group[i]].push_back(labels[i]);
    std::vector<std::vector<double>> groups;
    for (auto& [g, v] : by_group) groups.push_back(std::move(v));
    if (groups.size() < 2) throw StatsError("anova: both groups must be non-empty");
    return anova(groups);
}

} // namespace aave::stats
