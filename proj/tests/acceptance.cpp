// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failures (capped at 1).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "aaveaudit/aaveaudit.hpp"
#include "oracles.hpp"
#include "special_points.hpp"

namespace fs = std::filesystem;
using namespace aave;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Accumulates failures for one criterion; the first few are echoed.
struct Check {
    int failures = 0;
    std::vector<std::string> notes;

    void expect(bool ok, const std::string& what) {
        if (ok) return;
        ++failures;
        if (notes.size() < 5) notes.push_back(what);
    }
    void near(double got, double want, double tol, const std::string& what) {
        std::ostringstream s;
        s.precision(17);
        s << what << ": got " << got << ", want " << want << " +/- " << tol;
        expect(std::fabs(got - want) <= tol, s.str());
    }
};

int g_failed = 0;

void report(const std::string& name, const Check& c, const std::string& detail) {
    const bool ok = c.failures == 0;
    if (!ok) ++g_failed;
    std::cout << (ok ? "PASS " : "FAIL ") << name << " - " << detail;
    if (!ok) std::cout << " [" << c.failures << " failure(s)]";
    std::cout << "\n";
    for (const auto& n : c.notes) std::cout << "    " << n << "\n";
}

void run(const std::string& name, const std::function<std::string(Check&)>& body) {
    Check c;
    std::string detail;
    try {
        detail = body(c);
    } catch (const std::exception& e) {
        c.expect(false, std::string("exception: ") + e.what());
    }
    report(name, c, detail);
}

fs::path data_dir() { return AAVE_AUDIT_DATA_DIR; }

// ---------------------------------------------------------------------------

std::string golden_detectors(Check& c) {
    const auto t0 = Clock::now();
    std::size_t n = 0;
    for (const auto& line : io::read_lines(data_dir() / "fixtures" / "golden_detectors.jsonl")) {
        if (text::trim(line).empty()) continue;
        const auto j = nlohmann::json::parse(line);
        const auto want = j.at("features").get<std::map<std::string, long>>();
        const auto text = j.at("text").get<std::string>();
        const auto fv = detect_all(annotate_text(text), all_builtin_features());
        for (const auto& [f, count] : fv.counts) {
            const auto it = want.find(f);
            const long expected = it == want.end() ? 0 : it->second;
            c.expect(count == expected, "'" + text + "' " + f + "=" + std::to_string(count) + ", want " + std::to_string(expected));
        }
        ++n;
    }
    c.expect(n == 8, "golden corpus has " + std::to_string(n) + " sentences, want 8");
    const double secs = seconds_since(t0);
    c.expect(secs < 1.0, "took " + std::to_string(secs) + " s");
    return std::to_string(n) + " sentences, exact match, " + text::fmt_fixed(secs * 1000, 2) + " ms (< 1 s)";
}

std::string ddm_arithmetic(Check& c) {
    const std::vector<FeatureVector> fvs{detect_all(annotate_text("he ain't got no car", "A"), all_builtin_features()),
                                         detect_all(annotate_text("the weather is nice today", "B"), all_builtin_features())};
    const auto stats = fit_normalizer(fvs);
    const auto a = score(fvs[0], stats, 0.07);
    const auto b = score(fvs[1], stats, 0.07);
    c.near(a.ddm, 0.10, 1e-9, "ddm(A)");
    c.near(b.ddm, 0.00, 1e-9, "ddm(B)");
    c.expect(a.stratum == Stratum::high, "A not high");
    c.expect(b.stratum == Stratum::low, "B not low");
    c.expect(classify(0.07, 0.07) == Stratum::high, "ddm = 0.07 not high");
    return "A 0.10 high, B 0.00 low, ddm=0.07 -> high (tol 1e-9)";
}

std::string silver_suite(Check& c) {
    const auto pres = [](std::vector<int> v) { return presence(v); };
    const auto mode = [](std::vector<int> v) { return intensity_mode(v); };
    c.expect(pres({2, 2}), "{2,2} not present");
    c.expect(pres({3}), "{3} not present");
    c.expect(!pres({1, 2}), "{1,2} present");
    c.expect(!pres({2}), "{2} present");
    c.expect(mode({1, 3}) == 2.0, "{1,3} mode != 2");
    c.expect(mode({1, 1, 3, 3, 2}) == 2.0, "tied {1,3} with a 2 mode != 2");
    c.expect(mode({2, 2, 3, 3, 1}) == 2.5, "tied {2,3} mode != 2.5");

    // High-stratum post: ingroup says absent, outgroup says strongly present.
    std::vector<Annotation> anns;
    for (const char* who : {"i1", "i2"}) anns.push_back({"h", who, Group::ingroup, Emotion::anger, 1});
    for (const char* who : {"o1", "o2"}) anns.push_back({"h", who, Group::outgroup, Emotion::anger, 3});
    const auto gated = silver(anns, {{"h", {}, 0.2, Stratum::high}});
    const auto all = silver(anns, {{"h", {}, 0.0, Stratum::low}});
    const auto anger = [](const SilverResult& r) {
        for (const auto& l : r.labels)
            if (l.emotion == Emotion::anger) return l;
        throw std::runtime_error("no anger label");
    };
    c.expect(!anger(gated).present && anger(gated).eligible_group == EligibleGroup::ingroup_only, "gated label wrong");
    c.expect(anger(all).present && anger(all).eligible_group == EligibleGroup::all, "all-annotator label wrong");
    return "4 presence examples, 3 tie rules, gating fixture (ingroup-only absent vs all-annotator present)";
}

std::string stats_oracles(Check& c) {
    const auto t0 = Clock::now();
    constexpr int kInstances = 100;
    std::mt19937_64 rng(20240601);
    std::normal_distribution<double> z;

    for (int t = 0; t < kInstances; ++t) {
        const int n = 4 + t % 30;
        std::bernoulli_distribution bit(0.15 + 0.7 * (t % 5) / 4.0);
        std::vector<int> a(n), b(n);
        for (int i = 0; i < n; ++i) {
            a[i] = bit(rng);
            b[i] = rng() % 4 == 0 ? 1 - a[i] : a[i];
        }
        c.near(stats::kappa(a, b), oracle::kappa(a, b), 1e-12, "kappa #" + std::to_string(t));
    }

    for (int t = 0; t < kInstances; ++t) {
        const int k = 2 + t % 3;
        std::vector<std::vector<double>> groups(k);
        for (int g = 0; g < k; ++g)
            for (int i = 0; i < 3 + (t + g) % 5; ++i) groups[g].push_back(z(rng) + 0.4 * g);
        const double f = stats::anova(groups).f;
        c.near(f, oracle::anova_f(groups), 1e-9 * std::max(1.0, f), "anova F #" + std::to_string(t));
    }

    const oracle::RankPermutationNull null(10);
    double worst_p = 0.0;
    for (int t = 0; t < kInstances; ++t) {
        std::vector<int> y(10);
        std::iota(y.begin(), y.end(), 1);
        std::shuffle(y.begin(), y.end(), rng);
        std::vector<double> xd(10), yd(10);
        for (int i = 0; i < 10; ++i) {
            xd[i] = i + 1;
            yd[i] = y[i];
        }
        const auto r = stats::pearson(xd, yd);
        c.near(r.r, oracle::pearson_r(xd, yd), 1e-12, "pearson r #" + std::to_string(t));
        const double perm = null.p_value(y);
        worst_p = std::max(worst_p, std::fabs(r.p - perm));
        c.near(r.p, perm, 0.02, "pearson p vs permutation #" + std::to_string(t));
    }

    double worst_beta = 0.0;
    for (int t = 0; t < kInstances; ++t) {
        const int p = 1 + t % 5;
        const int n = p + 3 + t % 20;
        std::vector<std::vector<double>> cols(p);
        std::vector<std::string> names;
        for (int j = 0; j < p; ++j) {
            names.push_back("x" + std::to_string(j));
            for (int i = 0; i < n; ++i) cols[j].push_back(z(rng));
        }
        std::vector<double> y(n);
        for (int i = 0; i < n; ++i) {
            y[i] = z(rng) - 1.0;
            for (int j = 0; j < p; ++j) y[i] += 0.5 * (j + 1) * cols[j][i];
        }
        const auto r = stats::regress(y, cols, names);
        const auto ref = oracle::ols_normal_equations(y, cols);
        worst_beta = std::max(worst_beta, std::fabs(r.intercept.beta - ref[0]));
        c.near(r.intercept.beta, ref[0], 1e-6, "ols intercept #" + std::to_string(t));
        for (int j = 0; j < p; ++j) {
            worst_beta = std::max(worst_beta, std::fabs(r.coefficients[j].beta - ref[j + 1]));
            c.near(r.coefficients[j].beta, ref[j + 1], 1e-6, "ols beta #" + std::to_string(t));
        }
    }
    const double secs = seconds_since(t0);
    c.expect(secs < 30.0, "took " + std::to_string(secs) + " s");
    std::ostringstream d;
    d << kInstances << " instances each of kappa/ANOVA/Pearson/OLS; max |p - perm| " << text::fmt_fixed(worst_p, 4)
      << " (tol 0.02), max |beta - normal eq| " << worst_beta << " (tol 1e-6); " << text::fmt_fixed(secs, 2) << " s (< 30 s)";
    return d.str();
}

std::string disparity_reconstruction(Check& c) {
    std::vector<SilverLabel> silver;
    SystemPredictions preds;
    const auto add = [&](const std::string& id, Stratum s, bool gold, bool pred) {
        SilverLabel l;
        l.post_id = id;
        l.emotion = Emotion::anger;
        l.present = gold;
        l.stratum = s;
        silver.push_back(l);
        preds[id] = pred ? std::set<Emotion>{Emotion::anger} : std::set<Emotion>{};
    };
    std::vector<int> gold_h, pred_h, gold_l, pred_l;
    for (int i = 0; i < 5; ++i) {
        add("h" + std::to_string(i), Stratum::high, false, i < 3);
        gold_h.push_back(0);
        pred_h.push_back(i < 3);
    }
    for (int i = 0; i < 4; ++i) {
        add("l" + std::to_string(i), Stratum::low, false, i < 1);
        gold_l.push_back(0);
        pred_l.push_back(i < 1);
    }
    add("hp", Stratum::high, true, true);
    add("lp", Stratum::low, true, true);
    const auto rep = disparity({{"spanemo", preds}}, silver);
    const DisparityCell* cell = nullptr;
    for (const auto& x : rep.cells)
        if (x.emotion == Emotion::anger) cell = &x;
    c.expect(cell != nullptr, "no anger cell");
    if (cell) {
        c.expect(*cell->fpr_high().value() == oracle::fpr(pred_h, gold_h) && *cell->fpr_high().value() == 0.6, "fpr_high != 0.60");
        c.expect(*cell->fpr_low().value() == oracle::fpr(pred_l, gold_l) && *cell->fpr_low().value() == 0.25, "fpr_low != 0.25");
        c.expect(cell->dfpr().defined() && *cell->dfpr().value() == 2.4, "dFPR != 2.4");
    }
    const auto r = sample_representativeness(preds, preds);
    c.expect(r.jsd == 0.0, "jsd != 0");
    c.expect(r.pearson && *r.pearson == 1.0, "pearson != 1");
    c.expect(r.delta_refusal == 0.0, "delta refusal != 0");
    return "FPR 0.60 / 0.25 -> dFPR 2.4 (exact); identical sample/full -> (0, 1.0, 0)";
}

std::string special_functions(Check& c) {
    int n = 0;
    double worst = 0.0;
    const auto point = [&](double got, double want, const std::string& what) {
        worst = std::max(worst, std::fabs(got - want));
        c.near(got, want, 1e-6, what);
        ++n;
    };
    for (const auto& s : special_points::kStudentT)
        point(stats::student_t_two_sided(s.t, s.df), s.p, "t df=" + text::fmt_double(s.df));
    for (const auto& s : special_points::kFisherF)
        point(stats::f_upper_tail(s.f, s.d1, s.d2), s.p, "F(" + text::fmt_double(s.d1) + "," + text::fmt_double(s.d2) + ")");
    for (const auto& s : special_points::kIncompleteBeta) point(stats::incomplete_beta(s.a, s.b, s.x), s.value, "I_x");
    c.expect(n == 20, std::to_string(n) + " spot points, want 20");
    std::ostringstream d;
    d << n << " spot points (t, F, incomplete beta), max error " << worst << " (tol 1e-6)";
    return d.str();
}

std::string geo_suite(Check& c) {
    const auto square = [](std::string id, double x, double y) {
        geo::Tract t;
        t.geoid = std::move(id);
        t.add_ring({{x, y}, {x + 1, y}, {x + 1, y + 1}, {x, y + 1}, {x, y}});
        return t;
    };
    const std::vector<geo::Tract> tracts{square("A", 0, 0), square("B", 1, 0)};
    c.expect(geo::locate(geo::Point{0.5, 0.5}, tracts) == "A", "interior");
    c.expect(!geo::locate(geo::Point{2.5, 0.5}, tracts).has_value(), "exterior");
    c.expect(geo::locate(geo::Point{1.0, 0.5}, tracts) == "A", "shared edge -> first in file order");
    const std::vector<geo::Tract> flipped{square("B", 1, 0), square("A", 0, 0)};
    c.expect(geo::locate(geo::Point{1.0, 0.5}, flipped) == "B", "shared edge, reversed order");

    SystemPredictions preds;
    std::map<std::string, std::string> hood_of;
    for (int i = 0; i < 10; ++i) {
        const std::string id = "p" + std::to_string(i);
        hood_of[id] = "N";
        preds[id] = i < 3 ? std::set<Emotion>{Emotion::anger} : std::set<Emotion>{};
    }
    const auto probs = geo::neighborhood_emotion_prob(preds, hood_of, Emotion::anger, 10);
    c.expect(probs.probability.count("N") && probs.probability.at("N") == 0.3, "10-post probability != 0.3");

    std::map<std::string, geo::Neighborhood> hoods;
    std::map<std::string, double> prob;
    const std::vector<double> black{8.0, 27.5, 46.0, 63.0, 91.0};
    for (std::size_t i = 0; i < black.size(); ++i) {
        const std::string name = "N" + std::to_string(i);
        hoods[name].demographics["pct_black"] = black[i];
        prob[name] = 0.004 * black[i];
    }
    const auto r = geo::demographic_correlation(prob, hoods, "pct_black").r;
    c.near(r, 1.0, 1e-12, "proportional r");
    return "interior/exterior/shared-edge tie-break, 3/10 -> 0.3 exact, proportional pct_black -> r = 1.0";
}

std::string read_tree(const fs::path& dir, std::map<std::string, std::string>& out) {
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = io::read_file(e.path());
    return {};
}

std::string end_to_end(Check& c) {
    const auto fx = data_dir() / "fixtures";
    const auto root = fs::temp_directory_path() / ("aave-acceptance-" + std::to_string(std::random_device{}()));
    fs::create_directories(root);
    const auto quote = [](const fs::path& p) { return "'" + p.string() + "'"; };
    const std::string inputs = " --corpus " + quote(fx / "corpus.jsonl") + " --annotations " + quote(fx / "annotations.jsonl") +
                               " --predictions " + quote(fx / "predictions.jsonl") + " --full-predictions " +
                               quote(fx / "full_predictions.jsonl") + " --lexicon " + quote(fx / "lexicon.tsv") + " --tracts " +
                               quote(fx / "tracts.geojson") + " --demographics " + quote(fx / "demographics.csv") +
                               " --neighborhoods " + quote(fx / "neighborhoods.csv") + " --min-posts 5 --seed 7";
    const std::string cli = quote(AAVE_AUDIT_CLI);
    const auto log = quote(root / "log.txt");

    // Run 1 and 2 via flags; run 3 via a config file with the output dir from the environment.
    const int rc1 = std::system((cli + " all" + inputs + " --out " + quote(root / "run1") + " > " + log + " 2>&1").c_str());
    const int rc2 = std::system((cli + " all" + inputs + " --out " + quote(root / "run2") + " >> " + log + " 2>&1").c_str());
    {
        std::ofstream toml(root / "run.toml");
        toml << "corpus = \"" << (fx / "corpus.jsonl").string() << "\"\n"
             << "annotations = \"" << (fx / "annotations.jsonl").string() << "\"\n"
             << "predictions = [\"" << (fx / "predictions.jsonl").string() << "\"]\n"
             << "full-predictions = [\"" << (fx / "full_predictions.jsonl").string() << "\"]\n"
             << "lexicon = \"" << (fx / "lexicon.tsv").string() << "\"\n"
             << "tracts = \"" << (fx / "tracts.geojson").string() << "\"\n"
             << "demographics = \"" << (fx / "demographics.csv").string() << "\"\n"
             << "neighborhoods = \"" << (fx / "neighborhoods.csv").string() << "\"\n"
             << "min-posts = 5\nseed = 7\n";
    }
    const int rc3 = std::system(("AAVE_AUDIT_OUT=" + quote(root / "run3") + " " + cli + " --config " + quote(root / "run.toml") +
                                 " all >> " + log + " 2>&1")
                                    .c_str());
    c.expect(rc1 == 0 && rc2 == 0 && rc3 == 0, "CLI exit codes " + std::to_string(rc1) + "/" + std::to_string(rc2) + "/" +
                                                   std::to_string(rc3) + " (see " + (root / "log.txt").string() + ")");
    std::map<std::string, std::string> t1, t2, t3;
    if (rc1 == 0 && rc2 == 0 && rc3 == 0) {
        read_tree(root / "run1", t1);
        read_tree(root / "run2", t2);
        read_tree(root / "run3", t3);
        c.expect(!t1.empty(), "empty output tree");
        c.expect(t1 == t2, "run 1 and run 2 differ");
        c.expect(t1 == t3, "config-file run differs from flag run");
        for (const auto& [name, body] : t1)
            if (name.ends_with(".csv")) c.expect(body.starts_with("# config_hash="), name + " lacks the config hash line");
    }
    if (c.failures == 0) fs::remove_all(root);
    return std::to_string(t1.size()) + " files byte-identical across two flag runs and one config-file run";
}

} // namespace

int main() {
    run("detector-golden-corpus", golden_detectors);
    run("ddm-arithmetic", ddm_arithmetic);
    run("silver-label-suite", silver_suite);
    run("statistics-oracles", stats_oracles);
    run("disparity-reconstruction", disparity_reconstruction);
    run("special-functions", special_functions);
    run("geo", geo_suite);
    run("end-to-end-determinism", end_to_end);
    std::cout << (g_failed == 0 ? "ALL PASS" : std::to_string(g_failed) + " criterion/criteria FAILED") << "\n";
    return g_failed == 0 ? 0 : 1;
}
