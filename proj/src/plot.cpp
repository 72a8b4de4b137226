#include "fcritic/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include <png.h>

#include "fcritic/error.hpp"
#include "fcritic/font.hpp"

namespace fcritic {

Rgb parse_rgb(std::string_view hex) {
    if (hex.size() != 7 || hex[0] != '#') throw ParameterError("color must be #rrggbb: '" + std::string(hex) + "'");
    auto nibble = [&](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw ParameterError("color must be #rrggbb: '" + std::string(hex) + "'");
    };
    auto byte = [&](std::size_t i) { return static_cast<std::uint8_t>(nibble(hex[i]) * 16 + nibble(hex[i + 1])); };
    return {byte(1), byte(3), byte(5)};
}

std::string format_rgb(Rgb c) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
    return buf;
}

void PlotStyle::validate() const {
    if (width_px <= 0 || height_px <= 0) throw ParameterError("plot style: dimensions must be positive");
    if (width_px > 10000 || height_px > 10000) throw ParameterError("plot style: dimensions too large");
    if (!(band_opacity > 0.0 && band_opacity <= 1.0)) throw ParameterError("plot style: band opacity outside (0, 1]");
    if (history_color == forecast_color) throw ParameterError("plot style: history and forecast colors must differ");
    if (line_width < 1) throw ParameterError("plot style: line width must be >= 1");
}

Raster::Raster(int w, int h, Rgb fill) : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3) {
    for (std::size_t i = 0; i < pixels.size(); i += 3) {
        pixels[i] = fill.r;
        pixels[i + 1] = fill.g;
        pixels[i + 2] = fill.b;
    }
}

Rgb Raster::at(int x, int y) const noexcept {
    const auto i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3;
    return {pixels[i], pixels[i + 1], pixels[i + 2]};
}

void Raster::set(int x, int y, Rgb c) noexcept {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    const auto i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3;
    pixels[i] = c.r;
    pixels[i + 1] = c.g;
    pixels[i + 2] = c.b;
}

void Raster::blend(int x, int y, Rgb c, double opacity) noexcept {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    const Rgb base = at(x, y);
    auto mix = [&](std::uint8_t under, std::uint8_t over) {
        return static_cast<std::uint8_t>(std::lround(under * (1.0 - opacity) + over * opacity));
    };
    set(x, y, {mix(base.r, c.r), mix(base.g, c.g), mix(base.b, c.b)});
}

std::size_t Raster::count(Rgb c) const noexcept {
    std::size_t n = 0;
    for (std::size_t i = 0; i < pixels.size(); i += 3)
        if (pixels[i] == c.r && pixels[i + 1] == c.g && pixels[i + 2] == c.b) ++n;
    return n;
}

int PlotFrame::px(double x) const noexcept {
    const double f = x_max > x_min ? (x - x_min) / (x_max - x_min) : 0.5;
    return left + static_cast<int>(std::lround(f * (right - left)));
}

int PlotFrame::py(double y) const noexcept {
    const double f = y_max > y_min ? (y - y_min) / (y_max - y_min) : 0.5;
    return bottom - static_cast<int>(std::lround(f * (bottom - top)));
}

namespace {

constexpr double kPadding = 0.05;
constexpr Rgb kTextColor{0x33, 0x33, 0x33};

std::pair<double, double> padded(double lo, double hi) {
    double span = hi - lo;
    if (!(span > 0.0)) span = std::max(std::abs(lo), 1.0);
    return {lo - kPadding * span, hi + kPadding * span};
}

struct Margins {
    int left, right, top, bottom;
};

Margins margins_for(const PlotStyle& style) {
    // Fixed gutters for tick labels, shrunk on tiny canvases.
    const int w = style.width_px;
    const int h = style.height_px;
    return {std::min(70, w / 6), std::min(20, w / 20), std::min(20, h / 20), std::min(40, h / 8)};
}

void stamp(Raster& r, int x, int y, Rgb c, int width) {
    const int lo = -(width - 1) / 2;
    for (int dy = lo; dy < lo + width; ++dy)
        for (int dx = lo; dx < lo + width; ++dx) r.set(x + dx, y + dy, c);
}

void draw_line(Raster& r, int x0, int y0, int x1, int y1, Rgb c, int width) {
    const int dx = std::abs(x1 - x0);
    const int dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1;
    const int sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        stamp(r, x0, y0, c, width);
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

struct Polyline {
    std::vector<double> t;
    std::vector<double> y;
};

void draw_polyline(Raster& r, const PlotFrame& f, const Polyline& p, Rgb c, int width) {
    if (p.t.empty()) return;
    if (p.t.size() == 1) {
        stamp(r, f.px(p.t[0]), f.py(p.y[0]), c, width);
        return;
    }
    for (std::size_t i = 1; i < p.t.size(); ++i)
        draw_line(r, f.px(p.t[i - 1]), f.py(p.y[i - 1]), f.px(p.t[i]), f.py(p.y[i]), c, width);
}

std::string tick_label(double v, double span) {
    const int decimals = span >= 100 ? 0 : (span >= 10 ? 1 : (span >= 1 ? 2 : 3));
    if (std::abs(v) < 0.5 * std::pow(10.0, -decimals)) v = 0.0;  // no "-0.00"
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

void draw_axes(Raster& r, const PlotFrame& f, const PlotStyle& style) {
    draw_line(r, f.left, f.top, f.right, f.top, style.axis_color, 1);
    draw_line(r, f.left, f.bottom, f.right, f.bottom, style.axis_color, 1);
    draw_line(r, f.left, f.top, f.left, f.bottom, style.axis_color, 1);
    draw_line(r, f.right, f.top, f.right, f.bottom, style.axis_color, 1);

    constexpr int kTicks = 5;
    for (int i = 0; i <= kTicks; ++i) {
        const double xv = f.x_min + (f.x_max - f.x_min) * i / kTicks;
        const double yv = f.y_min + (f.y_max - f.y_min) * i / kTicks;
        const int x = f.px(xv);
        const int y = f.py(yv);
        draw_line(r, x, f.bottom, x, f.bottom + 4, style.axis_color, 1);
        draw_line(r, f.left - 4, y, f.left, y, style.axis_color, 1);
        if (style.test_mode) continue;
        const auto xl = tick_label(xv, f.x_max - f.x_min);
        const auto yl = tick_label(yv, f.y_max - f.y_min);
        font::draw_text(r, x - font::text_width(xl) / 2, f.bottom + 8, xl, kTextColor);
        font::draw_text(r, f.left - 8 - font::text_width(yl), y - font::kGlyphHeight / 2, yl, kTextColor);
    }
}

struct LegendEntry {
    std::string_view text;
    Rgb color;
};

void draw_legend(Raster& r, const PlotFrame& f, const PlotStyle& style, const std::vector<LegendEntry>& entries) {
    if (style.test_mode || !style.draw_legend) return;
    int widest = 0;
    for (const auto& e : entries) widest = std::max(widest, font::text_width(e.text));
    const int box_w = widest + 34;
    const int x0 = f.right - box_w - 6;
    int y = f.top + 8;
    for (const auto& e : entries) {
        draw_line(r, x0 + 4, y + 3, x0 + 22, y + 3, e.color, style.line_width);
        font::draw_text(r, x0 + 28, y, e.text, kTextColor);
        y += 12;
    }
}

void check_segments(const SeriesView& history, std::size_t forecast_len) {
    if (history.empty() || history.grid == nullptr) throw ParameterError("render: empty history");
    if (forecast_len == 0) throw ParameterError("render: empty forecast");
}

void check_actuals(std::optional<std::span<const double>> actuals, std::size_t horizon) {
    if (actuals && actuals->size() != horizon) throw ParameterError("render: actuals length must equal the horizon");
}

Polyline history_line(const SeriesView& h) {
    Polyline p;
    for (std::size_t i = 0; i < h.size(); ++i) {
        p.t.push_back(h.time(i));
        p.y.push_back(h[i]);
    }
    return p;
}

/// Line from the last history point through the given future values.
Polyline continuation(const SeriesView& h, std::span<const double> times, std::span<const double> values) {
    Polyline p;
    p.t.push_back(h.time(h.size() - 1));
    p.y.push_back(h[h.size() - 1]);
    p.t.insert(p.t.end(), times.begin(), times.end());
    p.y.insert(p.y.end(), values.begin(), values.end());
    return p;
}

std::vector<double> horizon_times(const SeriesView& history, std::size_t horizon) {
    std::vector<double> t(horizon);
    const std::size_t last = history.first + history.size() - 1;
    for (std::size_t i = 0; i < horizon; ++i)
        t[i] = history.grid->t0() + static_cast<double>(last + 1 + i) * history.grid->dt();
    return t;
}

void extend(double& lo, double& hi, std::span<const double> v) {
    for (double x : v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
}

}  // namespace

PlotFrame make_frame(const PlotStyle& style, double t_min, double t_max, double y_lo, double y_hi) {
    const Margins m = margins_for(style);
    PlotFrame f;
    f.left = m.left;
    f.right = style.width_px - 1 - m.right;
    f.top = m.top;
    f.bottom = style.height_px - 1 - m.bottom;
    std::tie(f.x_min, f.x_max) = padded(t_min, t_max);
    std::tie(f.y_min, f.y_max) = padded(y_lo, y_hi);
    return f;
}

PlotFrame point_frame(const SeriesView& history, const SeriesView& forecast, const PlotStyle& style,
                      std::optional<std::span<const double>> actuals) {
    check_segments(history, forecast.size());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    extend(lo, hi, history.values);
    extend(lo, hi, forecast.values);
    if (actuals) extend(lo, hi, *actuals);
    return make_frame(style, history.time(0), forecast.time(forecast.size() - 1), lo, hi);
}

PlotFrame probabilistic_frame(const SeriesView& history, const QuantileForecast& forecast, const PlotStyle& style,
                              std::optional<std::span<const double>> actuals) {
    check_segments(history, forecast.horizon());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    extend(lo, hi, history.values);
    for (std::size_t i = 0; i < forecast.level_count(); ++i) extend(lo, hi, forecast.path(i));
    if (actuals) extend(lo, hi, *actuals);
    const auto times = horizon_times(history, forecast.horizon());
    return make_frame(style, history.time(0), times.back(), lo, hi);
}

Raster rasterize_point(const SeriesView& history, const SeriesView& forecast, const PlotStyle& style,
                       std::optional<std::span<const double>> actuals) {
    style.validate();
    check_actuals(actuals, forecast.size());
    const PlotFrame f = point_frame(history, forecast, style, actuals);
    Raster r(style.width_px, style.height_px, style.background);
    draw_axes(r, f, style);

    std::vector<double> times(forecast.size());
    for (std::size_t i = 0; i < forecast.size(); ++i) times[i] = forecast.time(i);

    if (actuals) draw_polyline(r, f, continuation(history, times, *actuals), style.actuals_color, style.line_width);
    draw_polyline(r, f, history_line(history), style.history_color, style.line_width);
    draw_polyline(r, f, continuation(history, times, forecast.values), style.forecast_color, style.line_width);

    std::vector<LegendEntry> legend{{"history", style.history_color}, {"forecast", style.forecast_color}};
    if (actuals) legend.push_back({"actuals", style.actuals_color});
    draw_legend(r, f, style, legend);
    return r;
}

Raster rasterize_probabilistic(const SeriesView& history, const QuantileForecast& forecast, const PlotStyle& style,
                               std::optional<std::span<const double>> actuals) {
    style.validate();
    const auto* lo_path = forecast.find(0.1);
    const auto* median = forecast.find(0.5);
    const auto* hi_path = forecast.find(0.9);
    if (!lo_path || !median || !hi_path)
        throw ParameterError("render_probabilistic: forecast needs levels 0.1, 0.5 and 0.9");
    check_actuals(actuals, forecast.horizon());
    const PlotFrame f = probabilistic_frame(history, forecast, style, actuals);
    Raster r(style.width_px, style.height_px, style.background);
    draw_axes(r, f, style);

    const auto times = horizon_times(history, forecast.horizon());

    // Band: one pass per pixel column between the first and last horizon step.
    const int x_first = f.px(times.front());
    const int x_last = f.px(times.back());
    std::size_t seg = 0;
    for (int x = x_first; x <= x_last; ++x) {
        double lo;
        double hi;
        if (times.size() == 1) {
            lo = (*lo_path)[0];
            hi = (*hi_path)[0];
        } else {
            while (seg + 2 < times.size() && f.px(times[seg + 1]) < x) ++seg;
            const int xa = f.px(times[seg]);
            const int xb = f.px(times[seg + 1]);
            const double w = xb > xa ? std::clamp(static_cast<double>(x - xa) / (xb - xa), 0.0, 1.0) : 0.0;
            lo = (*lo_path)[seg] + w * ((*lo_path)[seg + 1] - (*lo_path)[seg]);
            hi = (*hi_path)[seg] + w * ((*hi_path)[seg + 1] - (*hi_path)[seg]);
        }
        for (int y = f.py(hi); y <= f.py(lo); ++y) r.blend(x, y, style.band_color, style.band_opacity);
    }

    if (actuals) draw_polyline(r, f, continuation(history, times, *actuals), style.actuals_color, style.line_width);
    draw_polyline(r, f, history_line(history), style.history_color, style.line_width);
    draw_polyline(r, f, continuation(history, times, *median), style.forecast_color, style.line_width);

    std::vector<LegendEntry> legend{{"history", style.history_color}, {"median", style.forecast_color}};
    if (actuals) legend.push_back({"actuals", style.actuals_color});
    draw_legend(r, f, style, legend);
    return r;
}

std::vector<std::uint8_t> encode_png(const Raster& raster) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(raster.width);
    image.height = static_cast<png_uint_32>(raster.height);
    image.format = PNG_FORMAT_RGB;
    image.flags = PNG_IMAGE_FLAG_FAST;

    png_alloc_size_t size = PNG_IMAGE_PNG_SIZE_MAX(image);
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&image, out.data(), &size, 0, raster.pixels.data(), 0, nullptr))
        throw std::runtime_error(std::string("png encode: ") + image.message);
    out.resize(size);
    return out;
}

Raster decode_png(std::span<const std::uint8_t> bytes) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
        throw ParameterError(std::string("png decode: ") + image.message);
    image.format = PNG_FORMAT_RGB;
    image.flags = PNG_IMAGE_FLAG_FAST;
    Raster r(static_cast<int>(image.width), static_cast<int>(image.height), Rgb{});
    if (!png_image_finish_read(&image, nullptr, r.pixels.data(), 0, nullptr)) {
        png_image_free(&image);
        throw ParameterError(std::string("png decode: ") + image.message);
    }
    return r;
}

std::vector<std::uint8_t> render_point(const SeriesView& history, const SeriesView& forecast, const PlotStyle& style,
                                       std::optional<std::span<const double>> actuals) {
    return encode_png(rasterize_point(history, forecast, style, actuals));
}

std::vector<std::uint8_t> render_probabilistic(const SeriesView& history, const QuantileForecast& forecast,
                                               const PlotStyle& style, std::optional<std::span<const double>> actuals) {
    return encode_png(rasterize_probabilistic(history, forecast, style, actuals));
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace fcritic
