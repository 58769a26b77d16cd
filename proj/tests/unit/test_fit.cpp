#include <doctest.h>

#include <cmath>
#include <vector>

#include "latkpp/error.hpp"
#include "latkpp/fit.hpp"

using namespace latkpp;

TEST_CASE("exact line is recovered with r2 = 1") {
    std::vector<double> x{1, 2, 3, 4, 5}, y;
    for (double v : x) y.push_back(-1.5 * v + 0.25);
    const auto f = least_squares(x, y);
    CHECK(f.slope == doctest::Approx(-1.5).epsilon(1e-14));
    CHECK(f.intercept == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f.slope_stderr < 1e-12);
    CHECK(f.n == 5);
}

TEST_CASE("slope standard error of a noisy line") {
    // residuals +-0.1 alternating: closed form available
    std::vector<double> x{0, 1, 2, 3}, y{0.1, 0.9, 2.1, 2.9};
    const auto f = least_squares(x, y);
    // sxx = 5, slope = sum((x-1.5)(y-1.5))/5 = 4.8/5
    CHECK(f.slope == doctest::Approx(0.96));
    const double sse = [&] {
        double s = 0;
        for (int i = 0; i < 4; ++i) s += std::pow(y[i] - (f.slope * x[i] + f.intercept), 2);
        return s;
    }();
    CHECK(f.slope_stderr == doctest::Approx(std::sqrt(sse / 2.0 / 5.0)));
}

TEST_CASE("degenerate inputs") {
    std::vector<double> one{1.0};
    CHECK_THROWS_AS(least_squares(one, one), InsufficientDataError);
    std::vector<double> x{2, 2, 2}, y{1, 2, 3};
    CHECK_THROWS_AS(least_squares(x, y), InsufficientDataError);
}
