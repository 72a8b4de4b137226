#include "fcritic/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fcritic/error.hpp"
#include "fcritic/rng.hpp"

namespace fcritic {

std::string_view perturb_type_name(PerturbType t) {
    switch (t) {
        case PerturbType::VerticalShift: return "vertical_shift";
        case PerturbType::TrendModify: return "trend_modify";
        case PerturbType::TimeStretch: return "time_stretch";
        case PerturbType::RandomSpikes: return "random_spikes";
    }
    return "unknown";
}

PerturbType perturb_type_from_name(std::string_view name) {
    if (name == "vertical_shift" || name == "shift") return PerturbType::VerticalShift;
    if (name == "trend_modify" || name == "trend") return PerturbType::TrendModify;
    if (name == "time_stretch" || name == "stretch") return PerturbType::TimeStretch;
    if (name == "random_spikes" || name == "spikes") return PerturbType::RandomSpikes;
    throw ParameterError("unknown perturbation type '" + std::string(name) + "'");
}

PerturbType type_of(const PerturbKind& kind) {
    return static_cast<PerturbType>(kind.index());
}

namespace {

double mean(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

TimeSeries vertical_shift(const TimeSeries& series, double omega) {
    const auto fc = series.forecast();
    if (fc.empty()) throw ParameterError("vertical_shift: empty forecast");
    const double shift = omega * mean(fc.values);
    std::vector<double> out(fc.values.begin(), fc.values.end());
    for (double& v : out) v += shift;
    return series.with_forecast(out);
}

LinearFit fit_linear(std::span<const double> t, std::span<const double> y) {
    if (t.size() != y.size()) throw ParameterError("fit_linear: length mismatch");
    if (t.size() < 2) throw ParameterError("fit_linear: need at least 2 points");
    // Fit on centered t.
    const double t_mean = mean(t);
    const double y_mean = mean(y);
    double stt = 0.0;
    double sty = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double dt = t[i] - t_mean;
        stt += dt * dt;
        sty += dt * (y[i] - y_mean);
    }
    if (!(stt > 0.0)) throw ParameterError("fit_linear: all t equal");
    LinearFit fit;
    fit.slope = sty / stt;
    fit.intercept = y_mean - fit.slope * t_mean;
    fit.residuals.resize(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) fit.residuals[i] = y[i] - (fit.slope * t[i] + fit.intercept);
    return fit;
}

TimeSeries trend_modify(const TimeSeries& series, double beta) {
    const auto fc = series.forecast();
    if (fc.size() < 2) throw ParameterError("trend_modify: forecast needs at least 2 points");
    std::vector<double> times(fc.size());
    for (std::size_t i = 0; i < fc.size(); ++i) times[i] = fc.time(i);
    const LinearFit fit = fit_linear(times, fc.values);

    const double slope = beta * fit.slope;
    const double t_c = times.front();
    const double intercept = fc.values.front() - slope * t_c - fit.residuals.front();

    std::vector<double> out(fc.size());
    for (std::size_t i = 0; i < fc.size(); ++i) out[i] = slope * times[i] + intercept + fit.residuals[i];
    // The anchor reproduces the original up to rounding; pin it exactly.
    out.front() = fc.values.front();
    return series.with_forecast(out);
}

TimeSeries time_stretch(const SeriesSpec& spec, const TimeGrid& grid, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("time_stretch: alpha must be positive");
    const TimeSeries base = generate(spec, grid);
    const std::size_t first = grid.forecast_begin();
    const double stretched_dt = alpha * grid.dt();
    auto stretched_time = [&](std::size_t k) { return grid.t0() + static_cast<double>(k) * stretched_dt; };

    const double offset = base[first] - spec.evaluate(stretched_time(first));
    std::vector<double> out(grid.forecast_size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = spec.evaluate(stretched_time(first + i)) + offset;
    out.front() = base[first];
    return base.with_forecast(out);
}

SpikeResult random_spikes(const TimeSeries& series, double gamma, std::size_t n_max, std::uint64_t seed) {
    const auto fc = series.forecast();
    if (fc.empty()) throw ParameterError("random_spikes: empty forecast");
    if (n_max < 1) throw ParameterError("random_spikes: n_max must be >= 1");
    if (n_max > fc.size()) throw ParameterError("random_spikes: n_max exceeds forecast length");

    Rng rng(seed);
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, n_max));

    // Partial Fisher-Yates over the forecast offsets.
    std::vector<std::size_t> pool(fc.size());
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(i, pool.size() - 1));
        std::swap(pool[i], pool[j]);
    }
    std::vector<std::size_t> chosen(pool.begin(), pool.begin() + static_cast<long>(n));
    std::vector<bool> positive(n);
    for (std::size_t i = 0; i < n; ++i) positive[i] = rng.coin();

    const double magnitude = gamma * *std::max_element(fc.values.begin(), fc.values.end());

    std::vector<double> out(fc.values.begin(), fc.values.end());
    std::vector<std::pair<std::size_t, double>> spikes;
    for (std::size_t i = 0; i < n; ++i) {
        const double eps = positive[i] ? magnitude : -magnitude;
        out[chosen[i]] += eps;
        spikes.emplace_back(fc.first + chosen[i], eps);
    }
    std::sort(spikes.begin(), spikes.end());

    SpikeResult result{series.with_forecast(out), {}, {}};
    for (const auto& [pos, eps] : spikes) {
        result.positions.push_back(pos);
        result.offsets.push_back(eps);
    }
    return result;
}

TimeSeries apply_perturbation(const PerturbKind& kind, const TimeSeries& series, const SeriesSpec& spec) {
    return std::visit(
        [&](const auto& p) -> TimeSeries {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, VerticalShift>) return vertical_shift(series, p.omega);
            else if constexpr (std::is_same_v<P, TrendModify>) return trend_modify(series, p.beta);
            else if constexpr (std::is_same_v<P, TimeStretch>) return time_stretch(spec, series.grid(), p.alpha);
            else return random_spikes(series, p.gamma, p.n_max, p.seed).series;
        },
        kind);
}

double smape(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size()) throw ParameterError("smape: length mismatch");
    if (actual.empty()) throw ParameterError("smape: empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double denom = std::max(std::abs(actual[i]) + std::abs(predicted[i]), kSmapeEpsilon);
        sum += 2.0 * std::abs(predicted[i] - actual[i]) / denom;
    }
    return 100.0 * sum / static_cast<double>(actual.size());
}

std::vector<std::size_t> select_worst(std::span<const double> smape_values, double fraction) {
    if (smape_values.empty()) throw ParameterError("filter_worst: no cases");
    if (!(fraction > 0.0 && fraction <= 1.0)) throw ParameterError("filter_worst: fraction outside (0, 1]");
    std::vector<std::size_t> order(smape_values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return smape_values[a] > smape_values[b]; });
    const auto keep = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(smape_values.size())));
    order.resize(keep);
    return order;
}

std::vector<PerturbedCase> filter_worst(const std::vector<PerturbedCase>& cases, double fraction) {
    std::vector<double> scores;
    scores.reserve(cases.size());
    for (const auto& c : cases) scores.push_back(c.smape);
    std::vector<PerturbedCase> kept;
    for (std::size_t i : select_worst(scores, fraction)) kept.push_back(cases[i]);
    return kept;
}

}  // namespace fcritic
