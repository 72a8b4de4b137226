#pragma once

#include <string_view>

#include "fcritic/plot.hpp"

namespace fcritic::font {

inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;
inline constexpr int kAdvance = 6;

/// Draw ASCII text with the built-in 5x7 bitmap font, top-left at (x, y).
/// Characters without a glyph are drawn as blanks.
void draw_text(Raster& raster, int x, int y, std::string_view text, Rgb color, int scale = 1);

int text_width(std::string_view text, int scale = 1);

}  // namespace fcritic::font
