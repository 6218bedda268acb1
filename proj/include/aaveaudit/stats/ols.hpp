#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "../error.hpp"
#include "special.hpp"

namespace aave::stats {

struct Coefficient {
    std::string name;
    double beta = 0.0;
    double std_err = 0.0;
    double t_stat = 0.0;
    double p_value = 1.0;
};

struct ExcludedColumn {
    std::string name;
    std::string reason;
};

struct RegressionResult {
    Coefficient intercept;
    std::vector<Coefficient> coefficients;
    double r_squared = 0.0;
    std::size_t n = 0;
    double df_resid = 0.0;
    std::vector<ExcludedColumn> excluded;
    std::vector<double> residuals;

    const Coefficient* find(const std::string& name) const {
        for (const auto& c : coefficients)
            if (c.name == name) return &c;
        return nullptr;
    }
};

struct OlsOptions {
    /// Constant columns are collinear with the intercept; drop them instead of failing.
    bool drop_constant_columns = true;
    /// Seeded uniform predictor noise of this magnitude (0 = off).
    double jitter = 0.0;
    unsigned long long seed = 0;
    /// Relative threshold on |R_kk| for the rank check.
    double rank_tolerance = 1e-10;
};

/// Dense column-major matrix, just enough for the least-squares solve.
class Matrix {
public:
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
    double& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> data_;
};

/// Householder QR with column pivoting, in place. R ends up in the upper
/// triangle, reflectors below it; `perm[k]` is the original column at position k.
struct PivotedQr {
    Matrix qr;
    std::vector<double> tau;
    std::vector<std::size_t> perm;
    std::size_t rank = 0;

    PivotedQr(Matrix a, double tolerance) : qr(std::move(a)) {
        const std::size_t m = qr.rows();
        const std::size_t n = qr.cols();
        perm.resize(n);
        std::iota(perm.begin(), perm.end(), 0);
        tau.assign(n, 0.0);
        std::vector<double> norms(n, 0.0);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < m; ++i) norms[j] += qr(i, j) * qr(i, j);
        const std::size_t steps = std::min(m, n);
        double r00 = 0.0;
        for (std::size_t k = 0; k < steps; ++k) {
            std::size_t best = k;
            for (std::size_t j = k + 1; j < n; ++j)
                if (norms[j] > norms[best]) best = j;
            if (best != k) {
                for (std::size_t i = 0; i < m; ++i) std::swap(qr(i, k), qr(i, best));
                std::swap(norms[k], norms[best]);
                std::swap(perm[k], perm[best]);
            }
            double alpha = 0.0;
            for (std::size_t i = k; i < m; ++i) alpha += qr(i, k) * qr(i, k);
            alpha = std::sqrt(alpha);
            if (k == 0) r00 = alpha;
            if (alpha <= tolerance * std::max(r00, 1.0)) break;
            if (qr(k, k) > 0) alpha = -alpha;
            // v = x - alpha e1, stored in place with v_k = x_k - alpha.
            const double vk = qr(k, k) - alpha;
            for (std::size_t i = k + 1; i < m; ++i) qr(i, k) /= vk;
            tau[k] = -vk / alpha;
            qr(k, k) = alpha;
            for (std::size_t j = k + 1; j < n; ++j) {
                double s = qr(k, j);
                for (std::size_t i = k + 1; i < m; ++i) s += qr(i, k) * qr(i, j);
                s *= tau[k];
                qr(k, j) -= s;
                for (std::size_t i = k + 1; i < m; ++i) qr(i, j) -= s * qr(i, k);
            }
            for (std::size_t j = k + 1; j < n; ++j) {
                double s = 0.0;
                for (std::size_t i = k + 1; i < m; ++i) s += qr(i, j) * qr(i, j);
                norms[j] = s;
            }
            rank = k + 1;
        }
    }

    /// Applies Q^T to y in place.
    void apply_qt(std::vector<double>& y) const {
        for (std::size_t k = 0; k < rank; ++k) {
            double s = y[k];
            for (std::size_t i = k + 1; i < qr.rows(); ++i) s += qr(i, k) * y[i];
            s *= tau[k];
            y[k] -= s;
            for (std::size_t i = k + 1; i < qr.rows(); ++i) y[i] -= s * qr(i, k);
        }
    }
};

/// Ordinary least squares y = b0 + sum_j bj * xj with per-coefficient t-tests.
/// `columns[j]` holds feature j over all observations.
inline RegressionResult regress(const std::vector<double>& y, const std::vector<std::vector<double>>& columns,
                                const std::vector<std::string>& names, const OlsOptions& opt = {}) {
    if (columns.size() != names.size()) throw StatsError("regress: names and columns differ in count");
    const std::size_t n = y.size();
    for (const auto& c : columns)
        if (c.size() != n) throw StatsError("regress: column length differs from response length");

    RegressionResult out;
    out.n = n;
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < columns.size(); ++j) {
        const auto [lo, hi] = std::minmax_element(columns[j].begin(), columns[j].end());
        if (opt.drop_constant_columns && (n == 0 || *lo == *hi)) {
            out.excluded.push_back({names[j], "constant"});
            continue;
        }
        kept.push_back(j);
    }
    const std::size_t p = kept.size() + 1;
    if (n <= p) throw StatsError("regress: need more observations (" + std::to_string(n) + ") than parameters (" + std::to_string(p) + ")");
    const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sst = 0.0;
    for (double v : y) sst += (v - ybar) * (v - ybar);
    if (sst == 0.0) throw StatsError("regress: constant response");

    Matrix x(n, p);
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> noise(-opt.jitter, opt.jitter);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        for (std::size_t k = 0; k < kept.size(); ++k)
            x(i, k + 1) = columns[kept[k]][i] + (opt.jitter > 0.0 ? noise(rng) : 0.0);
    }
    const Matrix design = x;
    PivotedQr qr(std::move(x), opt.rank_tolerance);
    if (qr.rank < p) {
        std::string dependent;
        for (std::size_t k = qr.rank; k < p; ++k) {
            const std::size_t col = qr.perm[k];
            if (!dependent.empty()) dependent += ", ";
            dependent += col == 0 ? std::string("intercept") : names[kept[col - 1]];
        }
        throw StatsError("regress: design matrix is rank deficient; dependent columns: " + dependent);
    }

    std::vector<double> qty = y;
    qr.apply_qt(qty);
    // Back substitution R z = (Q^T y)[0:p], then unpivot.
    std::vector<double> z(p, 0.0);
    for (std::size_t k = p; k-- > 0;) {
        double s = qty[k];
        for (std::size_t j = k + 1; j < p; ++j) s -= qr.qr(k, j) * z[j];
        z[k] = s / qr.qr(k, k);
    }
    std::vector<double> beta(p, 0.0);
    for (std::size_t k = 0; k < p; ++k) beta[qr.perm[k]] = z[k];

    // R^{-1}, upper triangular; (X^T X)^{-1} = P R^{-1} R^{-T} P^T.
    Matrix rinv(p, p);
    for (std::size_t j = 0; j < p; ++j) {
        rinv(j, j) = 1.0 / qr.qr(j, j);
        for (std::size_t i = j; i-- > 0;) {
            double s = 0.0;
            for (std::size_t k = i + 1; k <= j; ++k) s += qr.qr(i, k) * rinv(k, j);
            rinv(i, j) = -s / qr.qr(i, i);
        }
    }
    std::vector<double> diag(p, 0.0);
    for (std::size_t k = 0; k < p; ++k) {
        double s = 0.0;
        for (std::size_t j = k; j < p; ++j) s += rinv(k, j) * rinv(k, j);
        diag[qr.perm[k]] = s;
    }

    out.residuals.resize(n);
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double fit = 0.0;
        for (std::size_t j = 0; j < p; ++j) fit += design(i, j) * beta[j];
        out.residuals[i] = y[i] - fit;
        sse += out.residuals[i] * out.residuals[i];
    }
    out.df_resid = static_cast<double>(n - p);
    const double sigma2 = sse / out.df_resid;
    out.r_squared = std::clamp(1.0 - sse / sst, 0.0, 1.0);

    const auto make = [&](std::string name, std::size_t j) {
        Coefficient c;
        c.name = std::move(name);
        c.beta = beta[j];
        c.std_err = std::sqrt(sigma2 * diag[j]);
        if (c.std_err > 0.0) {
            c.t_stat = c.beta / c.std_err;
            c.p_value = student_t_two_sided(c.t_stat, out.df_resid);
        } else {
            c.t_stat = c.beta == 0.0 ? 0.0 : std::copysign(INFINITY, c.beta);
            c.p_value = c.beta == 0.0 ? 1.0 : 0.0;
        }
        return c;
    };
    out.intercept = make("intercept", 0);
    for (std::size_t k = 0; k < kept.size(); ++k) out.coefficients.push_back(make(names[kept[k]], k + 1));
    return out;
}

} // namespace aave::stats
