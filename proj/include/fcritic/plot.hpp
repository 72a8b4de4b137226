#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fcritic/series.hpp"

namespace fcritic {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Parses "#rrggbb". Throws ParameterError on malformed input.
Rgb parse_rgb(std::string_view hex);
std::string format_rgb(Rgb c);

struct PlotStyle {
    int width_px = 800;
    int height_px = 500;
    Rgb background{255, 255, 255};
    Rgb history_color{0x00, 0x00, 0x00};
    Rgb forecast_color{0x1f, 0x77, 0xb4};
    Rgb band_color{0x1f, 0x77, 0xb4};
    Rgb actuals_color{0xd6, 0x27, 0x28};
    Rgb axis_color{0x80, 0x80, 0x80};
    double band_opacity = 0.3;
    int line_width = 2;
    bool draw_legend = true;
    /// Suppresses all text (tick labels, legend).
    bool test_mode = false;

    /// Throws ParameterError: non-positive size, opacity outside (0, 1],
    /// identical history/forecast colors.
    void validate() const;
};

/// 8-bit RGB raster, row-major, origin top-left.
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // 3 bytes per pixel

    Raster(int w, int h, Rgb fill);

    Rgb at(int x, int y) const noexcept;
    void set(int x, int y, Rgb c) noexcept;
    /// Blend `c` over the current pixel with the given opacity.
    void blend(int x, int y, Rgb c, double opacity) noexcept;
    std::size_t count(Rgb c) const noexcept;
};

/// Data-to-pixel mapping shared by both plot kinds. Exposed so callers can
/// locate the split or a data point on the canvas.
struct PlotFrame {
    int left = 0;
    int right = 0;
    int top = 0;
    int bottom = 0;
    double x_min = 0.0;
    double x_max = 1.0;
    double y_min = 0.0;
    double y_max = 1.0;

    int px(double x) const noexcept;
    int py(double y) const noexcept;
};

/// Frame covering [t_min, t_max] x [y_lo, y_hi] with 5% padding on each axis.
PlotFrame make_frame(const PlotStyle& style, double t_min, double t_max, double y_lo, double y_hi);

/// History polyline ending at the split, forecast polyline starting from the
/// last history point. Optional future actuals (one per forecast step) in red.
Raster rasterize_point(const SeriesView& history, const SeriesView& forecast,
                       const PlotStyle& style,
                       std::optional<std::span<const double>> actuals = std::nullopt);

/// History plus a shaded 10-90% band and the median line. The forecast must
/// hold levels 0.1, 0.5 and 0.9; step i of the horizon sits at time
/// history.time(last) + (i + 1) * dt.
Raster rasterize_probabilistic(const SeriesView& history, const QuantileForecast& forecast,
                               const PlotStyle& style,
                               std::optional<std::span<const double>> actuals = std::nullopt);

/// Frame used by the renderers for the given inputs.
PlotFrame point_frame(const SeriesView& history, const SeriesView& forecast,
                      const PlotStyle& style, std::optional<std::span<const double>> actuals);
PlotFrame probabilistic_frame(const SeriesView& history, const QuantileForecast& forecast,
                              const PlotStyle& style,
                              std::optional<std::span<const double>> actuals);

/// Deterministic PNG encoding (no timestamps or text chunks).
std::vector<std::uint8_t> encode_png(const Raster& raster);
/// Decode an 8-bit RGB PNG produced by encode_png.
Raster decode_png(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> render_point(const SeriesView& history, const SeriesView& forecast,
                                       const PlotStyle& style,
                                       std::optional<std::span<const double>> actuals = std::nullopt);
std::vector<std::uint8_t> render_probabilistic(
    const SeriesView& history, const QuantileForecast& forecast, const PlotStyle& style,
    std::optional<std::span<const double>> actuals = std::nullopt);

void write_file(const std::string& path, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_file(const std::string& path);

}  // namespace fcritic
