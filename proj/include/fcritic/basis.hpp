#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fcritic/series.hpp"

namespace fcritic {

/// The fourteen synthetic base functions, numbered as in the generator table.
enum class Basis : int {
    GaussianWave = 1,
    LinearCos = 2,
    Linear = 3,
    Sin = 4,
    Sinc = 5,
    Beat = 6,
    Sigmoid = 7,
    Log = 8,
    SinScaled = 9,
    Square = 10,
    Step = 11,
    Multistep = 12,
    Chirp = 13,
    Sawtooth = 14,
};

inline constexpr int kBasisCount = 14;

/// Additive guard in the Sinc denominator.
inline constexpr double kSincEpsilon = 1e-10;

/// Throws ParameterError outside [1, 14].
Basis basis_from_id(int id);
std::string_view basis_name(Basis b);

/// Two-argument Heaviside: 0 for x < 0, at_zero for x == 0, 1 for x > 0.
constexpr double heaviside(double x, double at_zero) noexcept {
    return x < 0.0 ? 0.0 : (x > 0.0 ? 1.0 : at_zero);
}

/// Value of base function `b` at t.
///
/// Log is log(1 + t) and is only finite for t > -1; the generator only ever
/// evaluates it at non-negative arguments.
double eval_basis(Basis b, double t);

/// Breakpoints of the Multistep function, ascending.
inline constexpr std::array<double, 7> kMultistepBreaks{1.0, 2.5, 4.0, 5.5, 7.0, 8.5, 9.5};

struct Component {
    Basis basis = Basis::Linear;
    double w = 1.0;      // output scale
    double s = 1.0;      // input scale
    double delta = 0.0;  // input shift

    friend bool operator==(const Component&, const Component&) = default;
};

/// One synthetic series: y(t) = sum_i w_i * b_i(s_i * (t + delta_i)).
struct SeriesSpec {
    std::uint64_t seed = 0;
    std::vector<Component> components;

    /// Throws ParameterError unless 1..4 components with w, s in [0.5, 2]
    /// and delta in [0, 4].
    void validate() const;

    /// f(t) for a single time.
    double evaluate(double t) const;

    friend bool operator==(const SeriesSpec&, const SeriesSpec&) = default;
};

/// Draw a spec from the generator distributions:
/// n ~ U{1..4}, b ~ U{1..14}, w, s ~ U(0.5, 2), delta ~ U(0, 4).
SeriesSpec sample_spec(std::uint64_t seed);

/// Sample the spec on every grid point.
TimeSeries generate(const SeriesSpec& spec, const TimeGrid& grid);

/// The grid every synthetic experiment uses: t in {0, 0.1, ..., 10}, split at 8.
TimeGrid default_synthetic_grid();

// {"seed":..., "components":[{"basis":..., "w":..., "s":..., "delta":...}]}
void to_json(nlohmann::json& j, const SeriesSpec& spec);
SeriesSpec spec_from_json(const nlohmann::json& j);

}  // namespace fcritic
