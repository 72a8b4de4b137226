#include "fcritic/basis.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <nlohmann/json.hpp>

#include "fcritic/error.hpp"
#include "fcritic/rng.hpp"

namespace fcritic {

Basis basis_from_id(int id) {
    if (id < 1 || id > kBasisCount) throw ParameterError("basis id " + std::to_string(id) + " outside [1, 14]");
    return static_cast<Basis>(id);
}

std::string_view basis_name(Basis b) {
    switch (b) {
        case Basis::GaussianWave: return "gaussian_wave";
        case Basis::LinearCos: return "linear_cos";
        case Basis::Linear: return "linear";
        case Basis::Sin: return "sin";
        case Basis::Sinc: return "sinc";
        case Basis::Beat: return "beat";
        case Basis::Sigmoid: return "sigmoid";
        case Basis::Log: return "log";
        case Basis::SinScaled: return "sin_scaled";
        case Basis::Square: return "square";
        case Basis::Step: return "step";
        case Basis::Multistep: return "multistep";
        case Basis::Chirp: return "chirp";
        case Basis::Sawtooth: return "sawtooth";
    }
    return "unknown";
}

double eval_basis(Basis b, double t) {
    using std::numbers::pi;
    switch (b) {
        case Basis::GaussianWave:
            return 5.0 * std::exp(-0.00005 * (t - 6.0) * (t - 6.0)) * std::sin(0.5 * t);
        case Basis::LinearCos:
            return 0.3 + 0.5 * t + 0.2 * std::cos(10.0 * t);
        case Basis::Linear:
            return 0.3 + 0.5 * t;
        case Basis::Sin:
            return std::sin(4.0 * t);
        case Basis::Sinc: {
            const double denom = t + kSincEpsilon;
            // Only reachable at t == -eps exactly; use the limit 10 * 5.
            if (denom == 0.0) return 50.0;
            return 10.0 * std::sin(5.0 * t) / denom;
        }
        case Basis::Beat:
            return std::sin(t) * std::sin(5.0 * t);
        case Basis::Sigmoid:
            return 1.0 / (1.0 + std::exp(-4.0 * t));
        case Basis::Log:
            return std::log1p(t);
        case Basis::SinScaled:
            return 4.0 * (t + 1.0) * std::sin(5.0 * (t + 1.0) + 4.0);
        case Basis::Square:
            return 3.0 * t * t;
        case Basis::Step:
            return heaviside(t - 3.0, 1.0);
        case Basis::Multistep:
            return 0.2 * heaviside(t - 1.0, 1.0) + 0.3 * heaviside(t - 2.5, 1.0) -
                   0.1 * heaviside(t - 4.0, 1.0) + 0.4 * heaviside(t - 5.5, 1.0) -
                   0.3 * heaviside(t - 7.0, 1.0) + 0.2 * heaviside(t - 8.5, 1.0) +
                   0.1 * heaviside(t - 9.5, 1.0);
        case Basis::Chirp:
            return std::sin(10.0 * t * t);
        case Basis::Sawtooth:
            return 2.0 * (t / pi - std::ceil(0.5 + t / pi));
    }
    throw ParameterError("unknown basis");
}

void SeriesSpec::validate() const {
    if (components.empty() || components.size() > 4)
        throw ParameterError("series spec: need 1 to 4 components");
    for (const auto& c : components) {
        const int id = static_cast<int>(c.basis);
        if (id < 1 || id > kBasisCount) throw ParameterError("series spec: bad basis id");
        if (!(c.w >= 0.5 && c.w <= 2.0)) throw ParameterError("series spec: w outside [0.5, 2]");
        if (!(c.s >= 0.5 && c.s <= 2.0)) throw ParameterError("series spec: s outside [0.5, 2]");
        if (!(c.delta >= 0.0 && c.delta <= 4.0)) throw ParameterError("series spec: delta outside [0, 4]");
    }
}

double SeriesSpec::evaluate(double t) const {
    double y = 0.0;
    for (const auto& c : components) y += c.w * eval_basis(c.basis, c.s * (t + c.delta));
    return y;
}

SeriesSpec sample_spec(std::uint64_t seed) {
    Rng rng(seed);
    SeriesSpec spec;
    spec.seed = seed;
    const auto n = rng.uniform_int(1, 4);
    spec.components.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        Component c;
        c.basis = static_cast<Basis>(rng.uniform_int(1, kBasisCount));
        c.w = rng.uniform(0.5, 2.0);
        c.s = rng.uniform(0.5, 2.0);
        c.delta = rng.uniform(0.0, 4.0);
        spec.components.push_back(c);
    }
    return spec;
}

TimeSeries generate(const SeriesSpec& spec, const TimeGrid& grid) {
    std::vector<double> v(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) v[k] = spec.evaluate(grid.time(k));
    return TimeSeries(grid, std::move(v));
}

TimeGrid default_synthetic_grid() {
    return TimeGrid::make(0.0, 0.1, 101, 8.0);
}

void to_json(nlohmann::json& j, const SeriesSpec& spec) {
    auto comps = nlohmann::json::array();
    for (const auto& c : spec.components)
        comps.push_back({{"basis", static_cast<int>(c.basis)}, {"w", c.w}, {"s", c.s}, {"delta", c.delta}});
    j = nlohmann::json{{"seed", spec.seed}, {"components", std::move(comps)}};
}

SeriesSpec spec_from_json(const nlohmann::json& j) {
    SeriesSpec spec;
    try {
        spec.seed = j.value("seed", std::uint64_t{0});
        for (const auto& c : j.at("components"))
            spec.components.push_back({basis_from_id(c.at("basis").get<int>()), c.at("w").get<double>(),
                                       c.at("s").get<double>(), c.at("delta").get<double>()});
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("spec json: ") + e.what());
    }
    spec.validate();
    return spec;
}

}  // namespace fcritic
