#include "fcritic/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "fcritic/error.hpp"

namespace fcritic {

TimeGrid TimeGrid::make(double t0, double dt, std::size_t n_points, double split_time) {
    if (!std::isfinite(t0) || !std::isfinite(dt) || !std::isfinite(split_time))
        throw ParameterError("time grid: non-finite parameter");
    if (!(dt > 0.0)) throw ParameterError("time grid: dt must be positive");
    if (n_points < 2) throw ParameterError("time grid: need at least 2 points");

    const double t_last = t0 + static_cast<double>(n_points - 1) * dt;
    if (split_time < t0 || split_time >= t_last)
        throw ParameterError("time grid: split time outside [t0, t_last)");

    // 8.0 on a 0.1 grid is index 80.
    const double pos = (split_time - t0) / dt;
    auto k = static_cast<std::size_t>(std::floor(pos + 1e-9 * std::max(1.0, std::abs(pos))));
    k = std::min(k, n_points - 2);
    return TimeGrid(t0, dt, n_points, k);
}

TimeGrid TimeGrid::from_split_index(double t0, double dt, std::size_t n_points,
                                    std::size_t split_index) {
    if (!std::isfinite(t0) || !std::isfinite(dt)) throw ParameterError("time grid: non-finite parameter");
    if (!(dt > 0.0)) throw ParameterError("time grid: dt must be positive");
    if (n_points < 2) throw ParameterError("time grid: need at least 2 points");
    if (split_index + 1 >= n_points) throw ParameterError("time grid: split index leaves no forecast");
    return TimeGrid(t0, dt, n_points, split_index);
}

std::size_t TimeGrid::nearest_index(double t) const {
    const double pos = (t - t0_) / dt_;
    if (!std::isfinite(pos) || pos < -0.5 || pos > static_cast<double>(n_points_ - 1) + 0.5)
        throw ParameterError("time " + std::to_string(t) + " outside grid");
    const auto k = static_cast<long long>(std::llround(pos));
    return static_cast<std::size_t>(std::clamp<long long>(k, 0, static_cast<long long>(n_points_ - 1)));
}

TimeSeries::TimeSeries(TimeGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw ParameterError("time series: " + std::to_string(values_.size()) +
                             " values for a grid of " + std::to_string(grid_.size()));
    for (std::size_t k = 0; k < values_.size(); ++k)
        if (!std::isfinite(values_[k]))
            throw ParameterError("time series: non-finite value at index " + std::to_string(k));
}

SeriesView TimeSeries::history() const noexcept {
    return {&grid_, 0, std::span<const double>(values_).first(grid_.history_size())};
}

SeriesView TimeSeries::forecast() const noexcept {
    return {&grid_, grid_.forecast_begin(),
            std::span<const double>(values_).subspan(grid_.forecast_begin())};
}

TimeSeries TimeSeries::with_forecast(std::span<const double> forecast) const {
    if (forecast.size() != grid_.forecast_size())
        throw ParameterError("forecast length does not match the grid");
    std::vector<double> v(values_.begin(), values_.begin() + static_cast<long>(grid_.history_size()));
    v.insert(v.end(), forecast.begin(), forecast.end());
    return TimeSeries(grid_, std::move(v));
}

std::pair<SeriesView, SeriesView> split(const TimeSeries& series) {
    return {series.history(), series.forecast()};
}

TimeSeries join(const SeriesView& history, const SeriesView& forecast) {
    if (history.grid == nullptr || history.grid != forecast.grid)
        throw ParameterError("join: views from different grids");
    if (history.first != 0 || history.first + history.size() != forecast.first ||
        forecast.first + forecast.size() != history.grid->size())
        throw ParameterError("join: views are not adjacent and complete");
    std::vector<double> v(history.values.begin(), history.values.end());
    v.insert(v.end(), forecast.values.begin(), forecast.values.end());
    return TimeSeries(*history.grid, std::move(v));
}

QuantileForecast::QuantileForecast(std::vector<double> levels, std::vector<std::vector<double>> paths)
    : levels_(std::move(levels)), paths_(std::move(paths)) {
    if (levels_.empty()) throw ParameterError("quantile forecast: no levels");
    if (levels_.size() != paths_.size()) throw ParameterError("quantile forecast: levels/paths mismatch");
    for (std::size_t i = 0; i < levels_.size(); ++i) {
        if (!(levels_[i] > 0.0 && levels_[i] < 1.0))
            throw ParameterError("quantile forecast: level outside (0, 1)");
        if (i > 0 && !(levels_[i] > levels_[i - 1]))
            throw ParameterError("quantile forecast: levels not strictly increasing");
    }
    horizon_ = paths_.front().size();
    if (horizon_ == 0) throw ParameterError("quantile forecast: empty horizon");
    for (const auto& p : paths_) {
        if (p.size() != horizon_) throw ParameterError("quantile forecast: ragged paths");
        for (double v : p)
            if (!std::isfinite(v)) throw ParameterError("quantile forecast: non-finite value");
    }
    for (std::size_t t = 0; t < horizon_; ++t)
        for (std::size_t i = 1; i < paths_.size(); ++i)
            if (paths_[i][t] < paths_[i - 1][t])
                throw ParameterError("quantile forecast: quantile crossing at step " + std::to_string(t));
}

const std::vector<double>* QuantileForecast::find(double level) const noexcept {
    for (std::size_t i = 0; i < levels_.size(); ++i)
        if (std::abs(levels_[i] - level) < 1e-9) return &paths_[i];
    return nullptr;
}

void to_json(nlohmann::json& j, const TimeSeries& series) {
    j = nlohmann::json{{"t0", series.grid().t0()},
                       {"dt", series.grid().dt()},
                       {"split_index", series.grid().split_index()},
                       {"values", std::vector<double>(series.values().begin(), series.values().end())}};
}

TimeSeries series_from_json(const nlohmann::json& j) {
    try {
        auto values = j.at("values").get<std::vector<double>>();
        auto grid = TimeGrid::from_split_index(j.at("t0").get<double>(), j.at("dt").get<double>(),
                                               values.size(), j.at("split_index").get<std::size_t>());
        return TimeSeries(grid, std::move(values));
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("series json: ") + e.what());
    }
}

}  // namespace fcritic
