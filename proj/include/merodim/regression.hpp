#pragma once

#include <cstddef>
#include <span>

namespace merodim {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t n = 0;
};

// Ordinary least squares y ~ slope * x + intercept. Requires at least two
// points with distinct x. r_squared is 1 for a perfect fit and also when y
// is constant.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

} // namespace merodim
