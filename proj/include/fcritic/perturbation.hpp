#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "fcritic/basis.hpp"
#include "fcritic/series.hpp"

namespace fcritic {

// Forecast-segment perturbations. All of them leave the history untouched.

struct VerticalShift {
    double omega = 0.5;
};
struct TrendModify {
    double beta = -3.0;
};
struct TimeStretch {
    double alpha = 3.0;
};
struct RandomSpikes {
    double gamma = 0.5;
    std::size_t n_max = 3;
    std::uint64_t seed = 0;
};

using PerturbKind = std::variant<VerticalShift, TrendModify, TimeStretch, RandomSpikes>;

enum class PerturbType { VerticalShift, TrendModify, TimeStretch, RandomSpikes };

inline constexpr std::array<PerturbType, 4> kAllPerturbTypes{
    PerturbType::VerticalShift, PerturbType::TrendModify, PerturbType::TimeStretch,
    PerturbType::RandomSpikes};

std::string_view perturb_type_name(PerturbType t);
/// Accepts the canonical names plus the short CLI aliases (shift, trend, stretch, spikes).
PerturbType perturb_type_from_name(std::string_view name);
PerturbType type_of(const PerturbKind& kind);

/// Forecast values += omega * mean(original forecast).
TimeSeries vertical_shift(const TimeSeries& series, double omega);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<double> residuals;
};

/// Ordinary least squares y ~ slope*t + intercept. Needs >= 2 points and
/// non-constant t, else ParameterError.
LinearFit fit_linear(std::span<const double> t, std::span<const double> y);

/// Rescale the slope of the forecast's linear trend by beta, keeping the
/// residuals, re-anchored so the first forecast point is unchanged.
TimeSeries trend_modify(const TimeSeries& series, double beta);

/// Resample the generator on the stretched grid t0 + k*alpha*dt over the
/// forecast indices, offset so that the first forecast point matches the
/// unperturbed series. History comes from the unstretched generator.
TimeSeries time_stretch(const SeriesSpec& spec, const TimeGrid& grid, double alpha);

struct SpikeResult {
    TimeSeries series;
    /// Absolute grid indices of the spiked points, ascending.
    std::vector<std::size_t> positions;
    /// Signed offsets added at each position (same order).
    std::vector<double> offsets;
};

/// Add +-gamma*max(forecast) at n ~ U{1..n_max} distinct forecast points.
SpikeResult random_spikes(const TimeSeries& series, double gamma, std::size_t n_max,
                          std::uint64_t seed);

/// Apply any perturbation. TimeStretch needs the generating spec.
TimeSeries apply_perturbation(const PerturbKind& kind, const TimeSeries& series,
                              const SeriesSpec& spec);

inline constexpr double kSmapeEpsilon = 1e-10;

/// (100/n) * sum 2|p - a| / max(|a| + |p|, eps), in [0, 200].
double smape(std::span<const double> actual, std::span<const double> predicted);

struct PerturbedCase {
    TimeSeries series;
    TimeSeries perturbed;
    double smape = 0.0;
};

/// Indices of the floor(fraction * n) cases with the largest SMAPE, in
/// descending SMAPE order; ties go to the lower index.
std::vector<std::size_t> select_worst(std::span<const double> smape_values, double fraction);

std::vector<PerturbedCase> filter_worst(const std::vector<PerturbedCase>& cases, double fraction);

}  // namespace fcritic
