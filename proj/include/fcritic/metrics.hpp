#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fcritic/label.hpp"
#include "fcritic/series.hpp"

namespace fcritic {

/// Pinball loss q*(y - y_hat)^+ + (1 - q)*(y_hat - y)^+. q must lie in (0, 1).
double quantile_loss(double y, double y_hat, double q);

/// The nine deciles used by the CRPS rule.
inline constexpr std::array<double, 9> kCrpsLevels{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

struct QuantilePoint {
    double level;
    double value;
};

/// CRPS ~= 2 * mean over the nine deciles of QL_q(y, F^-1(q)).
/// Exactly the levels {0.1, ..., 0.9} (any order) must be supplied.
double crps(double y, std::span<const QuantilePoint> predictions);

/// Same rule with the decile predictions in level order.
double crps(double y, const std::array<double, 9>& decile_values);

/// sum_t CRPS(y_t, F_t) / sum_t |y_t|. The forecast must contain the nine
/// deciles (extra levels are ignored). Throws UndefinedScaleError when all
/// actuals are zero.
double scrps(std::span<const double> actuals, const QuantileForecast& forecast);

inline constexpr std::size_t kClassCount = 2;

constexpr std::size_t class_index(Label l) noexcept { return l == Label::Reasonable ? 0 : 1; }

struct ClassCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    /// True members of the class (tp + fn).
    std::size_t support() const noexcept { return tp + fn; }
};

struct Confusion {
    std::array<ClassCounts, kClassCount> classes{};

    static Confusion from(std::span<const Label> labels, std::span<const Label> predictions);

    const ClassCounts& operator[](Label l) const noexcept { return classes[class_index(l)]; }
    std::size_t total() const noexcept;
};

struct ClassF1 {
    double reasonable = 0.0;
    double unreasonable = 0.0;
};

/// F1 = 2PR/(P+R); 0 when tp = 0 but the class was predicted or present,
/// 1 when the class is entirely absent (tp = fp = fn = 0).
ClassF1 f1_per_class(const Confusion& confusion);

/// Support-weighted mean of the per-class F1. Throws ParameterError for
/// empty or mismatched inputs.
double weighted_f1(std::span<const Label> labels, std::span<const Label> predictions);
double weighted_f1(const Confusion& confusion);

struct RankTestResult {
    /// U of the first sample: rank sum of `a` minus n1(n1+1)/2.
    double u_stat = 0.0;
    /// Two-sided, normal approximation with tie-corrected variance and
    /// continuity correction.
    double p_value = 1.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
};

/// Midranks (1-based) of the pooled sample a ++ b.
std::vector<double> midranks(std::span<const double> pooled);

RankTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

enum class StdFlavor { Sample, Population };

struct SummaryStats {
    double median = 0.0;
    double mean = 0.0;
    double std = 0.0;
    std::size_t n = 0;
};

/// Median (midpoint for even n), mean and standard deviation. A single value
/// has sample std 0. Throws ParameterError on empty input.
SummaryStats summary_stats(std::span<const double> values, StdFlavor flavor = StdFlavor::Sample);

/// 100 * (a - b) / b; b == 0 throws UndefinedScaleError.
double pct_diff(double a, double b);

}  // namespace fcritic
