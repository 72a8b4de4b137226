#include "fcritic/promo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "fcritic/error.hpp"
#include "fcritic/rng.hpp"

namespace fcritic {

std::string_view label_name(Label l) {
    return l == Label::Reasonable ? "reasonable" : "unreasonable";
}

Label label_from_name(std::string_view name) {
    if (name == "reasonable") return Label::Reasonable;
    if (name == "unreasonable") return Label::Unreasonable;
    throw ParameterError("unknown label '" + std::string(name) + "'");
}

std::string_view scenario_name(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::A: return "A";
        case ScenarioKind::B: return "B";
        case ScenarioKind::C: return "C";
        case ScenarioKind::D: return "D";
    }
    return "?";
}

ScenarioKind scenario_from_name(std::string_view name) {
    if (name == "A" || name == "a") return ScenarioKind::A;
    if (name == "B" || name == "b") return ScenarioKind::B;
    if (name == "C" || name == "c") return ScenarioKind::C;
    if (name == "D" || name == "d") return ScenarioKind::D;
    throw ParameterError("unknown scenario '" + std::string(name) + "'");
}

TimeSeries inject_spike(const TimeSeries& series, double t_spike, double magnitude, std::size_t width) {
    if (width < 1) throw ParameterError("inject_spike: width must be >= 1");
    const auto& grid = series.grid();
    const std::size_t center = grid.nearest_index(t_spike);
    std::vector<double> v(series.values().begin(), series.values().end());
    const auto w = static_cast<long long>(width);
    for (long long j = -w; j <= w; ++j) {
        const long long k = static_cast<long long>(center) + j;
        if (k < 0 || k >= static_cast<long long>(v.size())) continue;
        const double factor = 1.0 - static_cast<double>(std::llabs(j)) / static_cast<double>(width + 1);
        v[static_cast<std::size_t>(k)] += magnitude * factor;
    }
    return TimeSeries(grid, std::move(v));
}

double round_sig3(double x) {
    if (x == 0.0 || !std::isfinite(x)) return x;
    const int exponent = static_cast<int>(std::floor(std::log10(std::abs(x))));
    const double scale = std::pow(10.0, 2 - exponent);
    return std::round(x * scale) / scale;
}

namespace {

/// Uniform time in [lo, hi] rounded to 3 significant digits, then clamped so
/// the rounding never leaves the window.
double draw_time(Rng& rng, double lo, double hi) {
    const double t = rng.uniform(lo, hi);
    return std::clamp(round_sig3(t), lo, hi);
}

}  // namespace

ScenarioCase build_scenario(ScenarioKind kind, const SeriesSpec& base_spec, const TimeGrid& grid,
                            std::uint64_t seed, const ScenarioParams& params) {
    if (params.spike_width < 1) throw ParameterError("build_scenario: spike width must be >= 1");
    const double clearance = static_cast<double>(params.spike_width) * grid.dt();
    const double hist_lo = grid.t0() + clearance;
    const double hist_hi = grid.split_time() - clearance;
    const double fcst_lo = grid.time(grid.forecast_begin()) + clearance;
    const double fcst_hi = grid.last_time() - clearance;
    if (hist_hi < hist_lo || fcst_hi < fcst_lo)
        throw ParameterError("build_scenario: windows too short for the spike width");

    TimeSeries series = generate(base_spec, grid);
    const auto hist = series.history().values;
    const auto [mn, mx] = std::minmax_element(hist.begin(), hist.end());
    const double range = *mx - *mn;
    // Flat history: unit scale.
    const double base_magnitude = params.magnitude_scale * (range > 1e-12 ? range : 1.0);

    // Same draw order for every kind.
    Rng rng(seed);
    PromoScenario sc;
    sc.kind = kind;
    sc.history_holiday_t = draw_time(rng, hist_lo, hist_hi);
    sc.forecast_holiday_t = draw_time(rng, fcst_lo, fcst_hi);
    const double d_ratio = rng.uniform(params.d_ratio_lo, params.d_ratio_hi);
    sc.spike_width = params.spike_width;
    sc.label = scenario_label(kind);
    sc.spec = base_spec;

    const bool history_lift = kind == ScenarioKind::C || kind == ScenarioKind::D;
    const bool forecast_spike = kind == ScenarioKind::B || kind == ScenarioKind::D;
    if (history_lift) sc.history_spike = base_magnitude;
    if (forecast_spike) sc.forecast_spike = kind == ScenarioKind::D ? base_magnitude * d_ratio : base_magnitude;

    if (history_lift) series = inject_spike(series, sc.history_holiday_t, sc.history_spike, sc.spike_width);
    if (forecast_spike) series = inject_spike(series, sc.forecast_holiday_t, sc.forecast_spike, sc.spike_width);
    return {std::move(series), std::move(sc)};
}

void to_json(nlohmann::json& j, const PromoScenario& s) {
    j = nlohmann::json{{"kind", scenario_name(s.kind)},
                       {"hist_holiday_t", s.history_holiday_t},
                       {"fcst_holiday_t", s.forecast_holiday_t},
                       {"label", label_name(s.label)},
                       {"hist_spike", s.history_spike},
                       {"fcst_spike", s.forecast_spike},
                       {"spike_width", s.spike_width},
                       {"spec", s.spec}};
}

}  // namespace fcritic
