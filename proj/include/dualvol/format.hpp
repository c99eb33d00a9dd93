#pragma once

#include <fmt/format.h>

#include <string>

namespace dualvol {

// 17 significant digits: enough for an exact double round trip.
inline std::string FormatReal(double v) { return fmt::format("{:.17g}", v); }

}  // namespace dualvol
