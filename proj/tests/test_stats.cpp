#include <gtest/gtest.h>

#include <random>

#include "aaveaudit/stats/agreement.hpp"
#include "aaveaudit/stats/confusion.hpp"
#include "aaveaudit/stats/descriptive.hpp"
#include "aaveaudit/stats/ols.hpp"
#include "aaveaudit/stats/special.hpp"
#include "oracles.hpp"
#include "special_points.hpp"

using namespace aave;
using namespace aave::stats;

TEST(Special, TablePoints) {
    for (const auto& s : special_points::kStudentT) EXPECT_NEAR(student_t_two_sided(s.t, s.df), s.p, 1e-6) << s.df;
    for (const auto& s : special_points::kFisherF) EXPECT_NEAR(f_upper_tail(s.f, s.d1, s.d2), s.p, 1e-6) << s.d1 << "," << s.d2;
    for (const auto& s : special_points::kIncompleteBeta) EXPECT_NEAR(incomplete_beta(s.a, s.b, s.x), s.value, 1e-12);
}

TEST(Special, EdgesAndDomain) {
    EXPECT_EQ(incomplete_beta(2, 3, 0.0), 0.0);
    EXPECT_EQ(incomplete_beta(2, 3, 1.0), 1.0);
    EXPECT_NEAR(student_t_two_sided(0.0, 7), 1.0, 1e-15);
    EXPECT_THROW(incomplete_beta(-1, 1, 0.5), StatsError);
    EXPECT_THROW(incomplete_beta(1, 1, 1.5), StatsError);
}

TEST(Kappa, Examples) {
    const std::vector<int> a{1, 1, 0, 0}, b{1, 0, 0, 1};
    EXPECT_NEAR(kappa(a, b), 0.0, 1e-15);
    const std::vector<int> same{1, 0, 1, 0, 0};
    EXPECT_EQ(kappa(same, same), 1.0);
    const std::vector<int> ones(6, 1), zeros(6, 0);
    EXPECT_EQ(kappa(ones, zeros), oracle::kappa(ones, zeros));
    EXPECT_EQ(kappa(ones, zeros), 0.0);
    EXPECT_EQ(kappa(ones, ones), 1.0);
    EXPECT_THROW(kappa(std::vector<int>{}, std::vector<int>{}), StatsError);
}

TEST(Kappa, MatchesOracleOnRandomVectors) {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 20;
        std::bernoulli_distribution bit(0.1 + 0.8 * (trial % 7) / 6.0);
        std::vector<int> a(n), b(n);
        for (int i = 0; i < n; ++i) {
            a[i] = bit(rng);
            b[i] = bit(rng);
        }
        EXPECT_NEAR(kappa(a, b), oracle::kappa(a, b), 1e-12);
    }
}

TEST(Kappa, WeightedReducesToUnweightedForTwoCategories) {
    const std::vector<int> a{1, 2, 2, 1, 2, 1}, b{1, 2, 1, 1, 2, 2};
    std::vector<int> a01, b01;
    for (int v : a) a01.push_back(v - 1);
    for (int v : b) b01.push_back(v - 1);
    EXPECT_NEAR(weighted_kappa(a, b, 1, 2, KappaWeights::linear), kappa(a01, b01), 1e-12);
    EXPECT_NEAR(weighted_kappa(a, b, 1, 2, KappaWeights::quadratic), kappa(a01, b01), 1e-12);
    EXPECT_NEAR(weighted_kappa(std::vector<int>{1, 2, 3}, std::vector<int>{1, 2, 3}, 1, 3, KappaWeights::quadratic), 1.0, 1e-12);
}

TEST(Jsd, Examples) {
    const std::vector<double> p{1, 2, 3}, q{0, 0, 5}, r{4, 0, 0};
    EXPECT_NEAR(jsd(p, p), 0.0, 1e-15);
    EXPECT_NEAR(jsd(q, r), 1.0, 1e-15);
    EXPECT_NEAR(jsd(p, std::vector<double>{2, 4, 6}), 0.0, 1e-15);
    EXPECT_THROW(jsd(std::vector<double>{0, 0}, std::vector<double>{1, 0}), StatsError);
}

TEST(Anova, Examples) {
    const auto eq = anova({{1, 2, 3}, {3, 2, 1}});
    EXPECT_NEAR(eq.f, 0.0, 1e-15);
    const std::vector<std::vector<double>> hand{{1, 1, 1, 0}, {0, 0, 0, 1}};
    EXPECT_NEAR(anova(hand).f, oracle::anova_f(hand), 1e-12);
    EXPECT_NEAR(anova(hand).f, 2.0, 1e-12);
    EXPECT_THROW(anova({{1, 1}, {2, 2}}), StatsError);
}

TEST(Anova, MatchesOracle) {
    std::mt19937_64 rng(202);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 100; ++trial) {
        const int k = 2 + trial % 3;
        std::vector<std::vector<double>> groups(k);
        for (int g = 0; g < k; ++g) {
            const int n = 2 + (trial + g) % 6;
            for (int i = 0; i < n; ++i) groups[g].push_back(z(rng) + 0.3 * g);
        }
        const auto r = anova(groups);
        EXPECT_NEAR(r.f, oracle::anova_f(groups), 1e-9 * std::max(1.0, r.f));
        EXPECT_NEAR(r.p, f_upper_tail(r.f, r.df_between, r.df_within), 1e-15);
    }
}

TEST(Pearson, Examples) {
    const std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> two, neg;
    for (double v : x) {
        two.push_back(2 * v);
        neg.push_back(-v);
    }
    EXPECT_NEAR(pearson(x, two).r, 1.0, 1e-15);
    EXPECT_NEAR(pearson(x, neg).r, -1.0, 1e-15);
    EXPECT_THROW(pearson(x, std::vector<double>(5, 1.0)), StatsError);
}

TEST(Pearson, PValueAgreesWithExactPermutationNull) {
    const oracle::RankPermutationNull null(10);
    std::mt19937_64 rng(303);
    std::vector<int> y(10);
    for (int trial = 0; trial < 25; ++trial) {
        std::iota(y.begin(), y.end(), 1);
        std::shuffle(y.begin(), y.end(), rng);
        std::vector<double> xd(10), yd(10);
        for (int i = 0; i < 10; ++i) {
            xd[i] = i + 1;
            yd[i] = y[i];
        }
        const auto c = pearson(xd, yd);
        EXPECT_NEAR(c.r, oracle::pearson_r(xd, yd), 1e-12);
        EXPECT_NEAR(c.p, null.p_value(y), 0.02);
    }
}

TEST(Ols, ExactLinearData) {
    std::mt19937_64 rng(404);
    std::normal_distribution<double> z;
    std::vector<double> f1, f2, y;
    for (int i = 0; i < 30; ++i) {
        f1.push_back(z(rng));
        f2.push_back(z(rng));
        y.push_back(3 + 2 * f1.back());
    }
    const auto r = regress(y, {f1, f2}, {"f1", "f2"});
    EXPECT_NEAR(r.intercept.beta, 3.0, 1e-9);
    EXPECT_NEAR(r.find("f1")->beta, 2.0, 1e-9);
    EXPECT_NEAR(r.find("f2")->beta, 0.0, 1e-9);
    EXPECT_NEAR(r.r_squared, 1.0, 1e-12);
}

TEST(Ols, NoiseHasNoSignal) {
    std::mt19937_64 rng(505);
    std::normal_distribution<double> z;
    std::vector<double> f1, f2, y;
    for (int i = 0; i < 200; ++i) {
        f1.push_back(z(rng));
        f2.push_back(z(rng));
        y.push_back(z(rng));
    }
    const auto r = regress(y, {f1, f2}, {"f1", "f2"});
    EXPECT_LT(r.r_squared, 0.05);
    for (const auto& c : r.coefficients) EXPECT_GT(c.p_value, 0.05) << c.name;
    const auto ref = oracle::ols_normal_equations(y, {f1, f2});
    EXPECT_NEAR(r.find("f1")->beta, ref[1], 1e-9);
}

TEST(Ols, MatchesNormalEquations) {
    std::mt19937_64 rng(606);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 100; ++trial) {
        const int p = 1 + trial % 4;
        const int n = p + 4 + trial % 17;
        std::vector<std::vector<double>> cols(p);
        std::vector<double> y(n);
        std::vector<std::string> names;
        for (int j = 0; j < p; ++j) {
            names.push_back("x" + std::to_string(j));
            for (int i = 0; i < n; ++i) cols[j].push_back(z(rng));
        }
        for (int i = 0; i < n; ++i) {
            y[i] = 0.5 + z(rng);
            for (int j = 0; j < p; ++j) y[i] += (j - 1.0) * cols[j][i];
        }
        const auto r = regress(y, cols, names);
        const auto ref = oracle::ols_normal_equations(y, cols);
        EXPECT_NEAR(r.intercept.beta, ref[0], 1e-6);
        for (int j = 0; j < p; ++j) EXPECT_NEAR(r.coefficients[j].beta, ref[j + 1], 1e-6);
    }
}

TEST(Ols, ConstantColumnsDroppedAndRankDeficiencyNamed) {
    const std::vector<double> y{1, 2, 3, 4, 5, 7};
    const std::vector<double> a{1, 0, 1, 0, 1, 1}, c(6, 0.0);
    std::vector<double> b;
    for (double v : a) b.push_back(2 * v);
    const auto r = regress(y, {a, c}, {"a", "c"});
    ASSERT_EQ(r.excluded.size(), 1u);
    EXPECT_EQ(r.excluded[0].name, "c");
    try {
        regress(y, {a, b}, {"a", "b"});
        FAIL() << "expected rank deficiency";
    } catch (const StatsError& e) {
        const std::string msg = e.what();
        EXPECT_TRUE(msg.ends_with(": a") || msg.ends_with(": b")) << msg;
    }
}

TEST(Ols, JitterIsSeeded) {
    const std::vector<double> y{1, 2, 3, 4, 5, 7};
    const std::vector<double> a{1, 0, 1, 0, 1, 1};
    OlsOptions opt;
    opt.jitter = 1e-6;
    opt.seed = 9;
    EXPECT_EQ(regress(y, {a}, {"a"}, opt).find("a")->beta, regress(y, {a}, {"a"}, opt).find("a")->beta);
}

TEST(Confusion, Arithmetic) {
    ConfusionCounts c;
    c.tp = 3;
    c.fp = 1;
    c.fn = 2;
    EXPECT_DOUBLE_EQ(*c.precision().value(), 0.75);
    EXPECT_DOUBLE_EQ(*c.recall().value(), 0.6);
    EXPECT_NEAR(*c.f1().value(), 0.6666666666666666, 1e-12);
    ConfusionCounts none;
    EXPECT_FALSE(none.precision().defined());
}

TEST(Confusion, RateRatio) {
    EXPECT_NEAR(*rate_ratio({3, 5}, {1, 4}).value(), 2.4, 1e-12);
    EXPECT_NEAR(*rate_ratio({1, 4}, {1, 4}).value(), 1.0, 1e-15);
    const auto undefined = rate_ratio({1, 2}, {0, 4});
    EXPECT_FALSE(undefined.defined());
    EXPECT_DOUBLE_EQ(undefined.numerator, 0.5);
}
