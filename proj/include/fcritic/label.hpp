#pragma once

#include <string_view>

namespace fcritic {

/// Binary verdict class. Answer option 1 is reasonable, 2 is unreasonable.
enum class Label { Reasonable, Unreasonable };

std::string_view label_name(Label l);
/// Throws ParameterError for anything but "reasonable"/"unreasonable".
Label label_from_name(std::string_view name);

}  // namespace fcritic
