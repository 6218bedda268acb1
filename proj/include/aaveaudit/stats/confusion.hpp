#pragma once

#include <optional>

namespace aave::stats {

/// A ratio whose denominator may be zero. Undefined values stay flagged
/// instead of becoming NaN or infinity.
struct Quotient {
    double numerator = 0.0;
    double denominator = 0.0;

    bool defined() const { return denominator != 0.0; }
    std::optional<double> value() const {
        if (!defined()) return std::nullopt;
        return numerator / denominator;
    }
};

struct ConfusionCounts {
    long tp = 0;
    long fp = 0;
    long tn = 0;
    long fn = 0;

    void add(bool predicted, bool actual) {
        if (predicted && actual) ++tp;
        else if (predicted) ++fp;
        else if (actual) ++fn;
        else ++tn;
    }

    long total() const { return tp + fp + tn + fn; }

    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        fp += o.fp;
        tn += o.tn;
        fn += o.fn;
        return *this;
    }

    bool operator==(const ConfusionCounts&) const = default;

    Quotient precision() const { return {double(tp), double(tp + fp)}; }
    Quotient recall() const { return {double(tp), double(tp + fn)}; }
    /// 2tp / (2tp + fp + fn): the harmonic mean of precision and recall where both exist.
    Quotient f1() const { return {2.0 * double(tp), double(2 * tp + fp + fn)}; }
    Quotient fpr() const { return {double(fp), double(fp + tn)}; }
    Quotient fnr() const { return {double(fn), double(fn + tp)}; }
};

/// high / low ratio of two rates; undefined when either rate is undefined or
/// the low-stratum rate is zero.
inline Quotient rate_ratio(const Quotient& high, const Quotient& low) {
    if (!high.defined() || !low.defined()) return {high.defined() ? *high.value() : 0.0, 0.0};
    return {*high.value(), *low.value()};
}

} // namespace aave::stats
