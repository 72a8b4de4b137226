#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "fcritic/basis.hpp"
#include "fcritic/label.hpp"
#include "fcritic/series.hpp"

namespace fcritic {

/// Promotional-holiday scenarios:
///   A: no lift in history, no spike in forecast   -> reasonable
///   B: no lift in history, spike in forecast      -> unreasonable
///   C: lift in history, no spike in forecast      -> unreasonable
///   D: lift in history, matching forecast spike   -> reasonable
enum class ScenarioKind { A, B, C, D };

inline constexpr std::array<ScenarioKind, 4> kAllScenarioKinds{ScenarioKind::A, ScenarioKind::B,
                                                               ScenarioKind::C, ScenarioKind::D};

std::string_view scenario_name(ScenarioKind k);
ScenarioKind scenario_from_name(std::string_view name);

constexpr Label scenario_label(ScenarioKind k) noexcept {
    return (k == ScenarioKind::A || k == ScenarioKind::D) ? Label::Reasonable
                                                          : Label::Unreasonable;
}

/// Additive triangular bump of height `magnitude` at the grid point nearest
/// t_spike, falling linearly to zero: offset j gets magnitude*(1 - |j|/(width+1))
/// for |j| <= width. Points past the grid edge are dropped.
TimeSeries inject_spike(const TimeSeries& series, double t_spike, double magnitude,
                        std::size_t width);

struct ScenarioParams {
    /// Spike height as a multiple of the history range (max - min).
    double magnitude_scale = 1.5;
    std::size_t spike_width = 1;
    /// Scenario D forecast spike = history spike * U(ratio_lo, ratio_hi).
    double d_ratio_lo = 0.75;
    double d_ratio_hi = 1.25;
};

struct PromoScenario {
    ScenarioKind kind = ScenarioKind::A;
    double history_holiday_t = 0.0;
    double forecast_holiday_t = 0.0;
    /// Height of the history spike (0 unless C or D).
    double history_spike = 0.0;
    /// Height of the forecast spike (0 unless B or D).
    double forecast_spike = 0.0;
    std::size_t spike_width = 1;
    Label label = Label::Reasonable;
    SeriesSpec spec;
};

struct ScenarioCase {
    TimeSeries series;
    PromoScenario scenario;
};

/// Round to three significant digits (the precision used in prompts).
double round_sig3(double x);

/// Build one scenario on top of generate(base_spec, grid). Holiday times are
/// drawn uniformly with at least spike_width grid steps of clearance from the
/// window edges and rounded to three significant digits.
ScenarioCase build_scenario(ScenarioKind kind, const SeriesSpec& base_spec, const TimeGrid& grid,
                            std::uint64_t seed, const ScenarioParams& params = {});

// {"kind":..., "hist_holiday_t":..., "fcst_holiday_t":..., "label":..., "spec":{...}, ...}
void to_json(nlohmann::json& j, const PromoScenario& s);

}  // namespace fcritic
