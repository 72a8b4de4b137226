#include <gtest/gtest.h>

#include <algorithm>
#include <string>

#include "fcritic/basis.hpp"
#include "fcritic/error.hpp"
#include "fcritic/plot.hpp"
#include "fcritic/rng.hpp"

using namespace fcritic;

namespace {

PlotStyle test_style() {
    PlotStyle s;
    s.test_mode = true;
    return s;
}

Rgb blended_band(const PlotStyle& s) {
    Raster one(1, 1, s.background);
    one.blend(0, 0, s.band_color, s.band_opacity);
    return one.at(0, 0);
}

QuantileForecast band(const std::vector<double>& mid, double half_width) {
    std::vector<double> lo, hi;
    for (double v : mid) {
        lo.push_back(v - half_width);
        hi.push_back(v + half_width);
    }
    return QuantileForecast({0.1, 0.5, 0.9}, {lo, mid, hi});
}

}  // namespace

TEST(Rgb, ParseAndFormat) {
    EXPECT_EQ(parse_rgb("#1f77b4"), (Rgb{0x1f, 0x77, 0xb4}));
    EXPECT_EQ(format_rgb(Rgb{0xd6, 0x27, 0x28}), "#d62728");
    EXPECT_THROW(parse_rgb("1f77b4"), ParameterError);
    EXPECT_THROW(parse_rgb("#1f77b"), ParameterError);
    EXPECT_THROW(parse_rgb("#gg77b4"), ParameterError);
}

TEST(PlotStyle, Validation) {
    PlotStyle s;
    EXPECT_NO_THROW(s.validate());
    s.band_opacity = 0.0;
    EXPECT_THROW(s.validate(), ParameterError);
    s = PlotStyle{};
    s.width_px = 0;
    EXPECT_THROW(s.validate(), ParameterError);
    s = PlotStyle{};
    s.forecast_color = s.history_color;
    EXPECT_THROW(s.validate(), ParameterError);
}

TEST(RenderPoint, ConstantSeriesIsAHorizontalLine) {
    const auto g = default_synthetic_grid();
    const TimeSeries s(g, std::vector<double>(g.size(), 2.0));
    const auto style = test_style();
    const Raster r = rasterize_point(s.history(), s.forecast(), style);
    const PlotFrame f = point_frame(s.history(), s.forecast(), style, std::nullopt);
    EXPECT_GT(r.count(style.history_color), 0u);
    EXPECT_GT(r.count(style.forecast_color), 0u);
    const int y = f.py(2.0);
    for (int yy = 0; yy < r.height; ++yy)
        for (int x = 0; x < r.width; ++x) {
            const Rgb c = r.at(x, yy);
            if (c == style.history_color || c == style.forecast_color) {
                ASSERT_LE(std::abs(yy - y), 1) << x << "," << yy;
            }
        }
}

TEST(RenderPoint, ForecastPixelsRightOfSplit) {
    const auto g = TimeGrid::make(0.0, 1.0, 3, 1.0);
    const TimeSeries s(g, {1.0, 3.0, 2.0});
    const auto style = test_style();
    const Raster r = rasterize_point(s.history(), s.forecast(), style);
    const PlotFrame f = point_frame(s.history(), s.forecast(), style, std::nullopt);
    const int split_x = f.px(g.split_time());
    std::size_t forecast_pixels = 0;
    for (int y = 0; y < r.height; ++y)
        for (int x = 0; x < r.width; ++x)
            if (r.at(x, y) == style.forecast_color) {
                ++forecast_pixels;
                ASSERT_GE(x, split_x);
            }
    EXPECT_GT(forecast_pixels, 0u);
}

TEST(RenderPoint, DeterministicBytesInTestMode) {
    const auto g = default_synthetic_grid();
    const auto s = generate(sample_spec(4), g);
    const auto style = test_style();
    EXPECT_EQ(render_point(s.history(), s.forecast(), style), render_point(s.history(), s.forecast(), style));
}

TEST(RenderPoint, TextOnlyOutsideTestMode) {
    const auto g = default_synthetic_grid();
    const auto s = generate(sample_spec(4), g);
    PlotStyle normal;
    const Rgb text{0x33, 0x33, 0x33};
    EXPECT_GT(rasterize_point(s.history(), s.forecast(), normal).count(text), 0u);
    EXPECT_EQ(rasterize_point(s.history(), s.forecast(), test_style()).count(text), 0u);
}

TEST(RenderPoint, ActualsDrawnInTheirColor) {
    const auto g = default_synthetic_grid();
    const auto s = generate(sample_spec(4), g);
    std::vector<double> actuals(s.forecast().values.begin(), s.forecast().values.end());
    for (double& v : actuals) v += 5.0;
    const auto style = test_style();
    const Raster r = rasterize_point(s.history(), s.forecast(), style, std::span<const double>(actuals));
    EXPECT_GT(r.count(style.actuals_color), 0u);
    const std::vector<double> wrong(3, 0.0);
    EXPECT_THROW(rasterize_point(s.history(), s.forecast(), style, std::span<const double>(wrong)), ParameterError);
}

TEST(RenderPoint, CustomSize) {
    const auto g = default_synthetic_grid();
    const auto s = generate(sample_spec(4), g);
    PlotStyle style = test_style();
    style.width_px = 320;
    style.height_px = 200;
    const Raster r = decode_png(render_point(s.history(), s.forecast(), style));
    EXPECT_EQ(r.width, 320);
    EXPECT_EQ(r.height, 200);
}

TEST(RenderProbabilistic, DegenerateBandHasNoArea) {
    const auto g = TimeGrid::make(0.0, 1.0, 148, 119.0);
    std::vector<double> hist(120), mid(28);
    for (std::size_t i = 0; i < hist.size(); ++i) hist[i] = 10 + std::sin(0.3 * i);
    for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 10 + std::sin(0.3 * (i + 120));
    const SeriesView h{&g, 0, hist};
    const auto style = test_style();
    const Rgb shade = blended_band(style);

    const Raster flat = rasterize_probabilistic(h, band(mid, 0.0), style);
    const Raster wide = rasterize_probabilistic(h, band(mid, 3.0), style);
    EXPECT_GT(flat.count(style.forecast_color), 0u);
    EXPECT_LT(flat.count(shade), 50u);
    EXPECT_GT(wide.count(shade), flat.count(shade));
    EXPECT_GT(wide.count(shade), 5000u);
}

TEST(RenderProbabilistic, StableBytesAndRequiredLevels) {
    const auto g = TimeGrid::make(0.0, 1.0, 148, 119.0);
    std::vector<double> hist(120, 1.0), mid(28, 1.5);
    const SeriesView h{&g, 0, hist};
    const auto style = test_style();
    EXPECT_EQ(render_probabilistic(h, band(mid, 0.5), style), render_probabilistic(h, band(mid, 0.5), style));
    const QuantileForecast missing({0.1, 0.9}, {mid, mid});
    EXPECT_THROW(rasterize_probabilistic(h, missing, style), ParameterError);
}

TEST(RenderProbabilistic, MedianRightOfHistory) {
    const auto g = TimeGrid::make(0.0, 1.0, 20, 9.0);
    std::vector<double> hist(10), mid(10);
    for (int i = 0; i < 10; ++i) {
        hist[i] = i;
        mid[i] = 10 - i;
    }
    const SeriesView h{&g, 0, hist};
    const auto style = test_style();
    const auto fc = band(mid, 1.0);
    const Raster r = rasterize_probabilistic(h, fc, style);
    const PlotFrame f = probabilistic_frame(h, fc, style, std::nullopt);
    for (int y = 0; y < r.height; ++y)
        for (int x = 0; x < r.width; ++x)
            if (r.at(x, y) == style.forecast_color) {
                ASSERT_GE(x, f.px(9.0));
            }
}

TEST(Png, RoundTripAndNoMetadataChunks) {
    Raster r(7, 5, Rgb{1, 2, 3});
    r.set(3, 2, Rgb{200, 100, 50});
    const auto bytes = encode_png(r);
    const Raster back = decode_png(bytes);
    EXPECT_EQ(back.width, 7);
    EXPECT_EQ(back.height, 5);
    EXPECT_EQ(back.pixels, r.pixels);
    const std::string s(bytes.begin(), bytes.end());
    EXPECT_EQ(s.find("tIME"), std::string::npos);
    EXPECT_EQ(s.find("tEXt"), std::string::npos);
    EXPECT_EQ(s.substr(1, 3), "PNG");
    const std::vector<std::uint8_t> junk{1, 2, 3};
    EXPECT_ANY_THROW(decode_png(junk));
}

TEST(Raster, BlendAndBounds) {
    Raster r(2, 2, Rgb{255, 255, 255});
    r.set(-1, 0, Rgb{0, 0, 0});
    r.set(2, 2, Rgb{0, 0, 0});
    EXPECT_EQ(r.count(Rgb{255, 255, 255}), 4u);
    r.blend(0, 0, Rgb{0, 0, 0}, 1.0);
    EXPECT_EQ(r.at(0, 0), (Rgb{0, 0, 0}));
    r.blend(1, 1, Rgb{0, 0, 0}, 0.5);
    EXPECT_NEAR(r.at(1, 1).r, 128, 1);
}
