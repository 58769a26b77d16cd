#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "latkpp/error.hpp"
#include "latkpp/lattice.hpp"

using namespace latkpp;

namespace {

const Dispersion kD = solve_dispersion(1.0);

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST_CASE("ghost access reads the clamps") {
    auto f = LatticeField::filled(-2, 2, 0.5, 1.0, 0.0);
    CHECK(f.size() == 5);
    CHECK(f.j_max() == 2);
    CHECK(f.at(-3) == 1.0);
    CHECK(f.at(3) == 0.0);
    CHECK(f.at(0) == 0.5);
    const auto s = LatticeField::step(-3, 3);
    CHECK(s.at(0) == 1.0);
    CHECK(s.at(1) == 0.0);
    CHECK(s.left_clamp == 1.0);
    const auto dl = LatticeField::delta(-3, 3, 2);
    CHECK(dl.sum() == 1.0);
    CHECK(dl.at(2) == 1.0);
}

TEST_CASE("constant states are stationary") {
    const auto logistic = make_logistic(1.0);
    CHECK(max_abs(rhs(LatticeField::filled(0, 9, 0.0), NonlinearKpp{logistic})) == 0.0);
    CHECK(max_abs(rhs(LatticeField::filled(0, 9, 1.0, 1.0, 1.0), NonlinearKpp{logistic})) == 0.0);
    CHECK(max_abs(rhs(LatticeField::filled(0, 9, 3.7, 3.7, 3.7), MovingFrame{kD})) < 1e-13);
}

TEST_CASE("moving frame stencil has both stated forms") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    auto f = LatticeField::filled(0, 19, 0.0, 0.3, -0.2);
    for (auto& v : f.values) v = u(rng);
    const auto d = rhs(f, MovingFrame{kD});
    const double el = std::exp(kD.lambda_star);
    for (long j = 0; j <= 19; ++j) {
        const double a = el * (f.at(j - 1) - 2 * f.at(j) + f.at(j + 1)) - kD.c_star * (f.at(j + 1) - f.at(j));
        CHECK(d[static_cast<std::size_t>(j)] == doctest::Approx(a).epsilon(1e-12));
    }
}

TEST_CASE("single-site linearized step matches the exponential") {
    for (double dt : {0.1, 0.05}) {
        const auto f = LatticeField::filled(0, 0, 1.0);
        const auto g = rk4_step(f, LinearizedKpp{1.0}, dt);
        const double err = std::abs(g.values[0] - std::exp(-dt));
        // local RK4 error is z^5/120 for z' = -z
        CHECK(err <= std::pow(dt, 5) / 120.0 * 1.01);
        CHECK(g.t == doctest::Approx(dt));
    }
}

TEST_CASE("zero field stays zero") {
    const auto z = LatticeField::filled(-5, 5, 0.0);
    for (const RhsKind& k : {RhsKind{NonlinearKpp{make_logistic(1.0)}}, RhsKind{LinearizedKpp{1.0}}, RhsKind{MovingFrame{kD}}})
        CHECK(max_abs(rk4_step(z, k, 0.01).values) == 0.0);
}

TEST_CASE("Richardson order of RK4 on the linearized system") {
    // smooth data, compare against a much finer reference
    auto f0 = LatticeField::filled(-30, 30, 0.0);
    for (long j = -30; j <= 30; ++j) f0[j] = std::exp(-0.02 * static_cast<double>(j * j));
    const double T = 1.0;
    auto solve = [&](std::size_t n) { return integrate(f0, MovingFrame{kD}, T / static_cast<double>(n), n); };
    const auto ref = solve(1600);
    auto err = [&](std::size_t n) {
        const auto s = solve(n);
        double e = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) e = std::max(e, std::abs(s.values[i] - ref.values[i]));
        return e;
    };
    const double e1 = err(20), e2 = err(40);
    const double order = std::log2(e1 / e2);
    MESSAGE("observed order " << order);
    CHECK(order >= 3.9);
}

TEST_CASE("integrate with zero steps returns the input") {
    const auto f = LatticeField::delta(-5, 5);
    const auto g = integrate(f, MovingFrame{kD}, 0.01, 0);
    CHECK(g.values == f.values);
    CHECK(g.t == f.t);
}

TEST_CASE("observers fire on their stride and time is exact") {
    std::vector<std::size_t> seen;
    std::vector<double> times;
    const Observer obs{3, [&](std::size_t k, const LatticeField& f) {
                           seen.push_back(k);
                           times.push_back(f.t);
                       }};
    const auto g = integrate(LatticeField::delta(-5, 5), MovingFrame{kD}, 0.1, 10, std::span(&obs, 1));
    CHECK(seen == std::vector<std::size_t>{3, 6, 9});
    CHECK(times[2] == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(g.t == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("blowup is reported with the step") {
    auto f = LatticeField::filled(0, 2, 0.0);
    f.values[1] = std::numeric_limits<double>::quiet_NaN();
    try {
        integrate(f, LinearizedKpp{1.0}, 0.01, 5);
        FAIL("expected BlowupError");
    } catch (const BlowupError& e) {
        CHECK(e.step() == 1);
    }
    auto big = LatticeField::filled(0, 0, 1e300);
    CHECK_THROWS_AS(integrate(big, LinearizedKpp{1e6}, 1.0, 50), BlowupError);
}

TEST_CASE("moving frame conserves mass from a delta") {
    const auto g = integrate(LatticeField::delta(-200, 200), MovingFrame{kD}, 0.01, 1000);
    CHECK(std::abs(g.sum() - 1.0) < 1e-8);
    CHECK(g.boundary_magnitude() < 1e-12);
}

TEST_CASE("positivity on random nonnegative data") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double dt = 0.1 / kD.cosh_lambda;
    std::size_t violations = 0;
    for (int run = 0; run < 50; ++run) {
        auto f = LatticeField::filled(-40, 40, 0.0);
        for (long j = -10; j <= 10; ++j) f[j] = u(rng) < 0.3 ? 0.0 : u(rng);
        const Observer obs{1, [&](std::size_t, const LatticeField& g) {
                               for (double v : g.values)
                                   if (v < 0.0) ++violations;
                           }};
        integrate(f, MovingFrame{kD}, dt, 200, std::span(&obs, 1));
    }
    CHECK(violations == 0);
}

TEST_CASE("step data stays in [0,1] and monotone") {
    const auto f = make_logistic(1.0);
    std::size_t bad = 0;
    const Observer obs{10, [&](std::size_t, const LatticeField& g) {
                           for (std::size_t i = 0; i < g.size(); ++i) {
                               if (g.values[i] < 0.0 || g.values[i] > 1.0) ++bad;
                               if (i > 0 && g.values[i] > g.values[i - 1]) ++bad;
                           }
                       }};
    integrate(LatticeField::step(-100, 150), NonlinearKpp{f}, 0.01, 3000, std::span(&obs, 1));
    CHECK(bad == 0);
}

TEST_CASE("ordering is preserved for randomized pairs") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto f = make_logistic(1.0);
    std::size_t bad = 0;
    for (int run = 0; run < 20; ++run) {
        auto lo = LatticeField::filled(-30, 30, 0.0);
        auto hi = lo;
        for (long j = -30; j <= 30; ++j) {
            lo[j] = u(rng);
            hi[j] = std::min(1.0, lo[j] + 0.5 * u(rng));
        }
        Rk4Stepper sa(NonlinearKpp{f}), sb(NonlinearKpp{f});
        for (int k = 0; k < 500; ++k) {
            sa.step(lo, 0.01);
            sb.step(hi, 0.01);
            for (std::size_t i = 0; i < lo.size(); ++i)
                if (hi.values[i] < lo.values[i]) ++bad;
        }
    }
    CHECK(bad == 0);
}

TEST_CASE("stepper agrees with rk4_step") {
    auto f = LatticeField::delta(-10, 10);
    const auto g = rk4_step(f, MovingFrame{kD}, 0.02);
    Rk4Stepper s(MovingFrame{kD});
    s.step(f, 0.02);
    CHECK(f.values == g.values);
    CHECK(f.t == g.t);
}

TEST_CASE("CSV layout") {
    auto f = LatticeField::filled(3, 4, 0.25);
    f.t = 1.5;
    std::ostringstream os;
    write_csv(os, f);
    CHECK(os.str() == "t,j,value\n1.5,3,0.25\n1.5,4,0.25\n");
}
