#pragma once

#include <cstddef>
#include <span>

namespace latkpp {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double slope_stderr = 0.0;  // standard error of the slope, 0 when n == 2
    std::size_t n = 0;
};

/// Ordinary least squares y = slope * x + intercept.
/// Throws InsufficientDataError for fewer than two points or constant x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace latkpp
