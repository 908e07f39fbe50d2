#pragma once

#include <string>
#include <string_view>

#include "merodim/types.hpp"

namespace merodim {

// Parses "1", "-2.5", "i", "-i", "3i", "1+2i", "1e-3-4.5i", "(1,2)".
// Throws std::invalid_argument on anything else.
Complex parse_complex(std::string_view text);

// Inverse of parse_complex; precision is in significant digits.
std::string format_complex(Complex z, int precision = 17);

} // namespace merodim
