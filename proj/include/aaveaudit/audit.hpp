#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ddm.hpp"
#include "error.hpp"
#include "features.hpp"
#include "labels.hpp"
#include "stats/agreement.hpp"
#include "stats/confusion.hpp"
#include "stats/descriptive.hpp"
#include "stats/ols.hpp"

namespace aave {

using stats::ConfusionCounts;
using stats::Quotient;

/// Thresholded predictions of one system: post -> emotion set, nullopt = refusal.
using SystemPredictions = std::map<std::string, std::optional<std::set<Emotion>>>;

/// system_id -> thresholded predictions.
using PredictionIndex = std::map<std::string, SystemPredictions>;

inline PredictionIndex index_predictions(const std::vector<Prediction>& preds, double score_threshold = kDefaultScoreThreshold) {
    PredictionIndex idx;
    for (const auto& p : preds) {
        auto& sys = idx[p.system_id()];
        if (!sys.emplace(p.post_id, threshold_predictions(p, score_threshold)).second)
            throw ValidationError("duplicate prediction for '" + p.post_id + "' by '" + p.system_id() + "'");
    }
    return idx;
}

enum class StratumFilter { all, high, low };

inline std::string_view to_string(StratumFilter f) {
    switch (f) {
    case StratumFilter::all: return "all";
    case StratumFilter::high: return "high";
    case StratumFilter::low: return "low";
    }
    return "all";
}

inline bool admits(StratumFilter f, Stratum s) {
    return f == StratumFilter::all || (f == StratumFilter::high) == (s == Stratum::high);
}

/// Per-emotion confusion counts of one system against silver presence.
/// Refused posts and posts without a silver label are skipped.
inline std::map<Emotion, ConfusionCounts> confusion(const SystemPredictions& preds, const std::vector<SilverLabel>& silver,
                                                    StratumFilter filter = StratumFilter::all) {
    std::map<Emotion, ConfusionCounts> out;
    for (Emotion e : kPrimaryEmotions) out[e] = {};
    bool overlap = false;
    for (const auto& l : silver) {
        const auto it = preds.find(l.post_id);
        if (it == preds.end()) continue;
        overlap = true;
        if (!it->second || !admits(filter, l.stratum)) continue;
        out[l.emotion].add(it->second->contains(l.emotion), l.present);
    }
    if (!overlap) throw ValidationError("predictions and silver labels share no post ids");
    return out;
}

struct DisparityCell {
    std::string system;
    Emotion emotion = Emotion::joy;
    ConfusionCounts high;
    ConfusionCounts low;

    Quotient fpr_high() const { return high.fpr(); }
    Quotient fpr_low() const { return low.fpr(); }
    Quotient fnr_high() const { return high.fnr(); }
    Quotient fnr_low() const { return low.fnr(); }
    Quotient dfpr() const { return stats::rate_ratio(fpr_high(), fpr_low()); }
    Quotient dfnr() const { return stats::rate_ratio(fnr_high(), fnr_low()); }

    ConfusionCounts pooled() const {
        ConfusionCounts c = high;
        c += low;
        return c;
    }
    Quotient fpr_mean() const { return pooled().fpr(); }
    Quotient fnr_mean() const { return pooled().fnr(); }
};

struct DisparityReport {
    std::vector<DisparityCell> cells;
    /// (system, emotion) pairs skipped because a stratum had no decisions.
    std::vector<std::string> missing_stratum;
};

/// FPR/FNR on high-DDM posts over the same rate on low-DDM posts.
inline DisparityReport disparity(const PredictionIndex& preds, const std::vector<SilverLabel>& silver) {
    DisparityReport out;
    for (const auto& [system, sys_preds] : preds) {
        const auto high = confusion(sys_preds, silver, StratumFilter::high);
        const auto low = confusion(sys_preds, silver, StratumFilter::low);
        for (Emotion e : kPrimaryEmotions) {
            DisparityCell cell{system, e, high.at(e), low.at(e)};
            if (cell.high.total() == 0 || cell.low.total() == 0) {
                out.missing_stratum.push_back(system + ":" + std::string(to_string(e)));
                continue;
            }
            out.cells.push_back(std::move(cell));
        }
    }
    return out;
}

struct Representativeness {
    double jsd = 0.0;
    std::optional<double> pearson;
    double delta_refusal = 0.0;
    std::vector<double> sample_freq;
    std::vector<double> full_freq;
};

/// Per-emotion prediction counts (refusals skipped) and the refusal rate.
inline std::pair<std::vector<double>, double> emotion_frequencies(const SystemPredictions& preds) {
    std::vector<double> freq(kPrimaryEmotions.size(), 0.0);
    std::size_t refusals = 0;
    for (const auto& [post, labels] : preds) {
        if (!labels) {
            ++refusals;
            continue;
        }
        for (std::size_t k = 0; k < kPrimaryEmotions.size(); ++k)
            if (labels->contains(kPrimaryEmotions[k])) freq[k] += 1.0;
    }
    const double rate = preds.empty() ? 0.0 : double(refusals) / double(preds.size());
    return {freq, rate};
}

/// Compares a model's behavior on the annotated sample with the full corpus:
/// JSD and Pearson of emotion frequencies, and the refusal-rate change (sample - full).
inline Representativeness sample_representativeness(const SystemPredictions& sample, const SystemPredictions& full) {
    Representativeness out;
    double sample_rate = 0.0;
    double full_rate = 0.0;
    std::tie(out.sample_freq, sample_rate) = emotion_frequencies(sample);
    std::tie(out.full_freq, full_rate) = emotion_frequencies(full);
    out.jsd = stats::jsd(out.sample_freq, out.full_freq);
    out.pearson = stats::pearson(out.sample_freq, out.full_freq).r;
    out.delta_refusal = sample_rate - full_rate;
    return out;
}

enum class Pairing { in_in, in_out, out_out, model_in, model_out };

inline std::string_view to_string(Pairing p) {
    switch (p) {
    case Pairing::in_in: return "in_in";
    case Pairing::in_out: return "in_out";
    case Pairing::out_out: return "out_out";
    case Pairing::model_in: return "model_in";
    case Pairing::model_out: return "model_out";
    }
    return "in_in";
}

struct PairKappa {
    Pairing pairing = Pairing::in_in;
    std::string rater_a;
    std::string rater_b;
    Emotion emotion = Emotion::joy;
    std::size_t overlap = 0;
    double kappa = 0.0;
};

struct AgreementCell {
    Pairing pairing = Pairing::in_in;
    /// System id for model pairings, empty otherwise.
    std::string model;
    Emotion emotion = Emotion::joy;
    double mean_kappa = 0.0;
    std::size_t pairs = 0;
};

struct AgreementMatrix {
    std::vector<AgreementCell> cells;
    std::vector<PairKappa> pairs;
    /// Pairs with fewer than two shared items, excluded from the means.
    std::size_t excluded_pairs = 0;

    const AgreementCell* find(Pairing p, Emotion e, const std::string& model = {}) const {
        for (const auto& c : cells)
            if (c.pairing == p && c.emotion == e && c.model == model) return &c;
        return nullptr;
    }
};

enum class KappaMode { binary, ordinal_linear, ordinal_quadratic };

struct AgreementOptions {
    StratumFilter filter = StratumFilter::all;
    /// Ordinal modes use the 1-3 ratings for human pairs; model pairs stay binary.
    KappaMode mode = KappaMode::binary;
};

/// Mean pairwise kappa per (pairing, emotion). Models are treated as extra
/// raters and paired against every human annotator.
inline AgreementMatrix agreement_matrix(const std::vector<Annotation>& annotations, const PredictionIndex& models,
                                        const std::map<std::string, Stratum>& strata, const AgreementOptions& opt = {}) {
    struct Rater {
        Group group;
        std::map<std::pair<std::string, Emotion>, int> ratings;
    };
    std::map<std::string, Rater> humans;
    for (const auto& a : annotations) {
        const auto st = strata.find(a.post_id);
        if (opt.filter != StratumFilter::all && (st == strata.end() || !admits(opt.filter, st->second))) continue;
        auto [it, inserted] = humans.try_emplace(a.annotator_id, Rater{a.group, {}});
        if (it->second.group != a.group) throw ValidationError("annotator '" + a.annotator_id + "' appears in both groups");
        it->second.ratings[{a.post_id, a.emotion}] = a.intensity;
    }

    AgreementMatrix out;
    std::map<std::tuple<Pairing, std::string, Emotion>, std::pair<double, std::size_t>> sums;
    const auto record = [&](Pairing pairing, const std::string& model, const std::string& ra, const std::string& rb,
                            Emotion e, const std::vector<int>& a, const std::vector<int>& b, bool ordinal) {
        if (a.size() < 2) {
            ++out.excluded_pairs;
            return;
        }
        double k = 0.0;
        if (ordinal) {
            const auto w = opt.mode == KappaMode::ordinal_linear ? stats::KappaWeights::linear : stats::KappaWeights::quadratic;
            k = stats::weighted_kappa(a, b, 1, 3, w);
        } else {
            k = stats::kappa(a, b);
        }
        out.pairs.push_back({pairing, ra, rb, e, a.size(), k});
        auto& s = sums[{pairing, model, e}];
        s.first += k;
        s.second += 1;
    };

    const bool ordinal = opt.mode != KappaMode::binary;
    for (auto ia = humans.begin(); ia != humans.end(); ++ia) {
        for (auto ib = std::next(ia); ib != humans.end(); ++ib) {
            const Group ga = ia->second.group;
            const Group gb = ib->second.group;
            const Pairing pairing = ga == gb ? (ga == Group::ingroup ? Pairing::in_in : Pairing::out_out) : Pairing::in_out;
            for (Emotion e : kPrimaryEmotions) {
                std::vector<int> a, b;
                for (const auto& [key, v] : ia->second.ratings) {
                    if (key.second != e) continue;
                    const auto other = ib->second.ratings.find(key);
                    if (other == ib->second.ratings.end()) continue;
                    a.push_back(ordinal ? v : int(rated_present(v)));
                    b.push_back(ordinal ? other->second : int(rated_present(other->second)));
                }
                record(pairing, {}, ia->first, ib->first, e, a, b, ordinal);
            }
        }
    }
    for (const auto& [system, preds] : models) {
        for (const auto& [name, rater] : humans) {
            const Pairing pairing = rater.group == Group::ingroup ? Pairing::model_in : Pairing::model_out;
            for (Emotion e : kPrimaryEmotions) {
                std::vector<int> a, b;
                for (const auto& [key, v] : rater.ratings) {
                    if (key.second != e) continue;
                    const auto p = preds.find(key.first);
                    if (p == preds.end() || !p->second) continue;
                    a.push_back(int(p->second->contains(e)));
                    b.push_back(int(rated_present(v)));
                }
                record(pairing, system, system, name, e, a, b, false);
            }
        }
    }
    for (const auto& [key, s] : sums) {
        const auto& [pairing, model, e] = key;
        out.cells.push_back({pairing, model, e, s.first / double(s.second), s.second});
    }
    return out;
}

struct GroupTest {
    Emotion emotion = Emotion::joy;
    stats::AnovaResult result;
    std::size_t n_ingroup = 0;
    std::size_t n_outgroup = 0;
};

/// One-way ANOVA of binary ratings, ingroup vs outgroup, per emotion.
/// `posts` restricts the test to a subset of posts when non-null.
inline std::vector<GroupTest> anova_by_group(const std::vector<Annotation>& annotations,
                                             const std::set<std::string>* posts = nullptr,
                                             std::vector<std::string>* skipped = nullptr) {
    std::vector<GroupTest> out;
    for (Emotion e : kPrimaryEmotions) {
        std::vector<double> in, outg;
        for (const auto& a : annotations) {
            if (a.emotion != e || (posts && !posts->contains(a.post_id))) continue;
            (a.group == Group::ingroup ? in : outg).push_back(rated_present(a.intensity) ? 1.0 : 0.0);
        }
        try {
            if (in.empty() || outg.empty()) throw StatsError("anova: both groups must be non-empty");
            out.push_back({e, stats::anova({in, outg}), in.size(), outg.size()});
        } catch (const StatsError& err) {
            if (skipped) skipped->push_back(std::string(to_string(e)) + ": " + err.what());
        }
    }
    return out;
}

/// Who produced a label series: an annotator (grouped by community) or a model system.
struct RaterKey {
    std::string group;
    std::string rater;
    auto operator<=>(const RaterKey&) const = default;
};

struct FeatureRegression {
    RaterKey rater;
    Emotion emotion = Emotion::joy;
    stats::RegressionResult result;
};

struct RegressionBatch {
    std::vector<FeatureRegression> fits;
    std::vector<std::string> skipped;
};

namespace detail {

inline std::optional<stats::RegressionResult> fit_one(const std::map<std::string, double>& labels,
                                                      const std::map<std::string, const DdmScore*>& ddm,
                                                      const stats::OlsOptions& opt, std::string& why) {
    std::set<std::string> names;
    for (const auto& [post, y] : labels) {
        const auto it = ddm.find(post);
        if (it != ddm.end())
            for (const auto& [f, v] : it->second->normalized) names.insert(f);
    }
    std::vector<std::string> used;
    std::vector<stats::ExcludedColumn> pre;
    for (const auto& f : names) {
        if (is_perplexity_feature(f)) pre.push_back({f, "perplexity"});
        else used.push_back(f);
    }
    std::vector<double> y;
    std::vector<std::vector<double>> cols(used.size());
    for (const auto& [post, label] : labels) {
        const auto it = ddm.find(post);
        if (it == ddm.end()) continue;
        y.push_back(label);
        for (std::size_t j = 0; j < used.size(); ++j) {
            const auto v = it->second->normalized.find(used[j]);
            cols[j].push_back(v == it->second->normalized.end() ? 0.0 : v->second);
        }
    }
    try {
        auto r = stats::regress(y, cols, used, opt);
        r.excluded.insert(r.excluded.begin(), pre.begin(), pre.end());
        return r;
    } catch (const StatsError& e) {
        why = e.what();
        return std::nullopt;
    }
}

} // namespace detail

/// One OLS fit per (rater, emotion): binary labels on the normalized DDM
/// features of each labeled post. Perplexity (`ext:ppl*`) features are left out.
inline RegressionBatch regress_features(const std::vector<Annotation>& annotations, const PredictionIndex& models,
                                        const std::vector<DdmScore>& scores, const stats::OlsOptions& opt = {}) {
    std::map<std::string, const DdmScore*> ddm;
    for (const auto& s : scores) ddm[s.post_id] = &s;

    std::map<std::pair<RaterKey, Emotion>, std::map<std::string, double>> series;
    for (const auto& a : annotations)
        series[{RaterKey{std::string(to_string(a.group)), a.annotator_id}, a.emotion}][a.post_id] = rated_present(a.intensity) ? 1.0 : 0.0;
    for (const auto& [system, preds] : models) {
        for (Emotion e : kPrimaryEmotions) {
            auto& s = series[{RaterKey{system, system}, e}];
            for (const auto& [post, labels] : preds)
                if (labels) s[post] = labels->contains(e) ? 1.0 : 0.0;
        }
    }
    RegressionBatch out;
    for (const auto& [key, labels] : series) {
        std::string why;
        auto r = detail::fit_one(labels, ddm, opt, why);
        if (r) {
            out.fits.push_back({key.first, key.second, std::move(*r)});
        } else {
            out.skipped.push_back(key.first.rater + ":" + std::string(to_string(key.second)) + ": " + why);
        }
    }
    return out;
}

struct InfluenceMatrix {
    /// group -> emotion -> feature -> mean significant coefficient.
    std::map<std::string, std::map<Emotion, std::map<std::string, double>>> cells;
    /// group -> feature -> mean absolute significant coefficient.
    std::map<std::string, std::map<std::string, double>> abs_mean;

    bool empty() const { return cells.empty(); }
};

/// Averages coefficients with p < alpha per (group, emotion, feature).
inline InfluenceMatrix feature_influence_summary(const std::vector<FeatureRegression>& fits, double alpha = 0.05) {
    std::map<std::string, std::map<Emotion, std::map<std::string, std::pair<double, std::size_t>>>> sums;
    std::map<std::string, std::map<std::string, std::pair<double, std::size_t>>> abs_sums;
    for (const auto& fit : fits) {
        for (const auto& c : fit.result.coefficients) {
            if (!(c.p_value < alpha)) continue;
            auto& s = sums[fit.rater.group][fit.emotion][c.name];
            s.first += c.beta;
            s.second += 1;
            auto& a = abs_sums[fit.rater.group][c.name];
            a.first += std::fabs(c.beta);
            a.second += 1;
        }
    }
    InfluenceMatrix out;
    for (const auto& [g, by_emotion] : sums)
        for (const auto& [e, by_feature] : by_emotion)
            for (const auto& [f, s] : by_feature) out.cells[g][e][f] = s.first / double(s.second);
    for (const auto& [g, by_feature] : abs_sums)
        for (const auto& [f, s] : by_feature) out.abs_mean[g][f] = s.first / double(s.second);
    return out;
}

} // namespace aave
