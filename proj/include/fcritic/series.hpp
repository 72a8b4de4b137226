#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace fcritic {

/// Uniform time grid t_k = t0 + k*dt, k = 0..n_points-1, split into a history
/// part [0, split_index] and a forecast part (split_index, n_points-1].
/// Times are computed as t0 + k*dt on demand.
class TimeGrid {
public:
    /// Split index is the largest k with t_k <= split_time.
    /// Throws ParameterError for dt <= 0, n_points < 2, or split_time outside
    /// [t0, t_last).
    static TimeGrid make(double t0, double dt, std::size_t n_points, double split_time);

    /// Grid with an explicit split index; requires split_index < n_points - 1.
    static TimeGrid from_split_index(double t0, double dt, std::size_t n_points,
                                     std::size_t split_index);

    double t0() const noexcept { return t0_; }
    double dt() const noexcept { return dt_; }
    std::size_t size() const noexcept { return n_points_; }
    std::size_t split_index() const noexcept { return split_index_; }

    double time(std::size_t k) const noexcept { return t0_ + static_cast<double>(k) * dt_; }
    double split_time() const noexcept { return time(split_index_); }
    double last_time() const noexcept { return time(n_points_ - 1); }

    std::size_t history_size() const noexcept { return split_index_ + 1; }
    std::size_t forecast_size() const noexcept { return n_points_ - split_index_ - 1; }
    std::size_t forecast_begin() const noexcept { return split_index_ + 1; }

    /// Index of the grid point nearest to t; throws ParameterError if t lies
    /// outside [t0, t_last] (half a step of slack on either side).
    std::size_t nearest_index(double t) const;

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    TimeGrid(double t0, double dt, std::size_t n, std::size_t split)
        : t0_(t0), dt_(dt), n_points_(n), split_index_(split) {}

    double t0_;
    double dt_;
    std::size_t n_points_;
    std::size_t split_index_;
};

/// Contiguous read-only window of a series, aware of its position on the grid.
struct SeriesView {
    const TimeGrid* grid = nullptr;
    std::size_t first = 0;
    std::span<const double> values;

    std::size_t size() const noexcept { return values.size(); }
    bool empty() const noexcept { return values.empty(); }
    double time(std::size_t i) const noexcept { return grid->time(first + i); }
    double operator[](std::size_t i) const noexcept { return values[i]; }
};

/// Finite values sampled on a TimeGrid.
class TimeSeries {
public:
    /// Throws ParameterError on length mismatch or non-finite values.
    TimeSeries(TimeGrid grid, std::vector<double> values);

    const TimeGrid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t k) const noexcept { return values_[k]; }

    SeriesView history() const noexcept;
    SeriesView forecast() const noexcept;

    /// Copy of this series with the forecast segment replaced.
    TimeSeries with_forecast(std::span<const double> forecast) const;

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    TimeGrid grid_;
    std::vector<double> values_;
};

/// Split a series into its history and forecast segments.
std::pair<SeriesView, SeriesView> split(const TimeSeries& series);

/// Inverse of split; the two views must be adjacent on the same grid.
TimeSeries join(const SeriesView& history, const SeriesView& forecast);

/// Per-level forecast paths over a common horizon.
///
/// Levels are strictly increasing in (0, 1) and, at every step, path values
/// must be non-decreasing across levels. Violations throw ParameterError.
class QuantileForecast {
public:
    QuantileForecast(std::vector<double> levels, std::vector<std::vector<double>> paths);

    std::span<const double> levels() const noexcept { return levels_; }
    std::size_t horizon() const noexcept { return horizon_; }
    std::size_t level_count() const noexcept { return levels_.size(); }

    /// Path for a level, matched within 1e-9; nullptr if absent.
    const std::vector<double>* find(double level) const noexcept;
    const std::vector<double>& path(std::size_t level_index) const { return paths_.at(level_index); }
    bool has_level(double level) const noexcept { return find(level) != nullptr; }

private:
    std::vector<double> levels_;
    std::vector<std::vector<double>> paths_;
    std::size_t horizon_ = 0;
};

// JSONL record: {"t0":..., "dt":..., "split_index":..., "values":[...]}
void to_json(nlohmann::json& j, const TimeSeries& series);
TimeSeries series_from_json(const nlohmann::json& j);

}  // namespace fcritic
