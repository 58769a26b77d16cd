#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "latkpp/error.hpp"
#include "latkpp/green.hpp"
#include "oracles.hpp"

using namespace latkpp;
using cd = std::complex<double>;

namespace {

const Dispersion kD = solve_dispersion(1.0);

std::vector<GreenSnapshot> run(long L, std::vector<double> times, ContaminationPolicy p = ContaminationPolicy::Throw) {
    return temporal_green(kD, L, 0.01, times, p);
}

}  // namespace

TEST_CASE("first step from the delta") {
    const auto s = run(100, {0.01});
    CHECK(s[0].at(0) == doctest::Approx(1.0 - 2.0 * kD.cosh_lambda * 0.01).epsilon(1e-3));
    CHECK(std::abs(s[0].at(0) - (1.0 - 2.0 * kD.cosh_lambda * 0.01)) < 0.01 * 0.01 * 10.0);
}

TEST_CASE("mass and positivity before contamination") {
    const auto s = run(400, {1, 5, 20, 50, 100});
    for (const auto& g : s) {
        CHECK_FALSE(g.contaminated);
        CHECK(std::abs(g.mass() - 1.0) <= 1e-8);
        CHECK(g.min_value() >= -1e-12);
    }
}

TEST_CASE("matches the Bessel closed form") {
    const auto s = run(200, {1.0, 2.0, 5.0, 20.0});
    for (const auto& g : s)
        for (long j = g.j_min; j <= g.j_max(); j += 7)
            CHECK(std::abs(g.at(j) - oracle::bessel_green(j, g.t, kD.lambda_star)) < 1e-9);
}

TEST_CASE("contamination is raised or flagged") {
    CHECK_THROWS_AS(run(100, {40.0}), ContaminationError);
    const auto s = run(100, {10.0, 40.0}, ContaminationPolicy::Flag);
    CHECK_FALSE(s[0].contaminated);
    CHECK(s[1].contaminated);
    CHECK_THROWS_AS(run(99, {1.0}), DomainError);
}

TEST_CASE("remainder decays like t^-3/2") {
    const auto s = run(1000, {100.0, 400.0}, ContaminationPolicy::Flag);
    const double ratio = decompose(s[1], kD).E_sup / decompose(s[0], kD).E_sup;
    CHECK(ratio >= 0.125 / 1.3);
    CHECK(ratio <= 0.125 * 1.3);
}

TEST_CASE("scaled remainder stays within a factor 3 over [50, 400]") {
    std::vector<double> ts;
    for (double t = 50; t <= 400; t += 25) ts.push_back(t);
    const auto s = run(1000, ts, ContaminationPolicy::Flag);
    double lo = INFINITY, hi = 0.0;
    for (const auto& g : s) {
        const double v = decompose(g, kD).E_sup * std::pow(g.t, 1.5);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(hi / lo <= 3.0);
}

TEST_CASE("decomposition bookkeeping") {
    const auto s = run(300, {30.0});
    const auto dec = decompose(s[0], kD);
    double m = 0.0;
    for (std::size_t i = 0; i < dec.R.size(); ++i) {
        CHECK(dec.R[i] == dec.G[i] - dec.H[i]);
        m = std::max(m, std::abs(dec.R[i]));
    }
    CHECK(dec.E_sup == m);
    CHECK(dec.E_sup > 0.0);
}

TEST_CASE("slope fit on synthetic laws") {
    std::vector<std::pair<double, double>> a, b;
    for (double t = 10; t <= 400; t *= 2) {
        a.emplace_back(t, std::pow(t, -1.5));
        b.emplace_back(t, 5.0 * std::pow(t, -2.0));
    }
    const auto fa = slope_fit(a, 10.0);
    CHECK(fa.slope == doctest::Approx(-1.5).epsilon(1e-12));
    CHECK(fa.r2 == doctest::Approx(1.0).epsilon(1e-12));
    const auto fb = slope_fit(b, 10.0);
    CHECK(fb.slope == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(fb.intercept == doctest::Approx(std::log(5.0)).epsilon(1e-12));
    CHECK_THROWS_AS(slope_fit(a, 100.0), InsufficientDataError);
}

TEST_CASE("extracted cubic at t = 400") {
    const auto s = run(1000, {400.0}, ContaminationPolicy::Flag);
    const auto pts = extract_P(s[0], kD, 2.0);
    REQUIRE(pts.size() > 20);
    double sup = 0.0, near0 = INFINITY, p0 = 0.0;
    for (const auto& p : pts) {
        sup = std::max(sup, std::abs(p.p_tilde - p.p_exact));
        CHECK(p.p_exact == doctest::Approx(cubic_P(p.xi, kD)));
        if (std::abs(p.xi) < near0) {
            near0 = std::abs(p.xi);
            p0 = p.p_tilde;
        }
    }
    CHECK(sup <= 0.1);
    CHECK(std::abs(p0) <= 0.1);
    // approximate oddness: pair each point with its mirror by nearest xi
    for (const auto& p : pts) {
        const PTildePoint* best = nullptr;
        for (const auto& q : pts)
            if (!best || std::abs(q.xi + p.xi) < std::abs(best->xi + p.xi)) best = &q;
        if (std::abs(best->xi + p.xi) < 0.02) CHECK(std::abs(p.p_tilde + best->p_tilde) <= 0.1);
    }
    CHECK_THROWS_AS(extract_P(s[0], kD, 3.5), DomainError);
}

TEST_CASE("center value approaches the principal part") {
    const auto s = run(1000, {400.0}, ContaminationPolicy::Flag);
    const long j = std::lround(kD.c_star * 400.0);
    const double scaled = std::sqrt(400.0) * s[0].at(j);
    CHECK(std::abs(scaled / (1.0 / std::sqrt(4.0 * std::numbers::pi * kD.cosh_lambda)) - 1.0) <= 0.02);
    CHECK(std::abs(s[0].at(j) - principal_H(j, 400.0, kD)) <= 1e-3 / std::sqrt(400.0));
}

TEST_CASE("roots of the characteristic quadratic") {
    const auto [rm, rp] = rho_pm(0.0, kD);
    CHECK(std::abs(rm - 1.0) < 1e-12);
    CHECK(std::abs(rp - std::exp(2.0 * kD.lambda_star)) < 1e-10);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 50; ++i) {
        const cd nu(u(rng), u(rng));
        const auto [a, b] = rho_pm(nu, kD);
        CHECK(std::abs(a * b - std::exp(2.0 * kD.lambda_star)) < 1e-9 * std::exp(2.0 * kD.lambda_star));
    }
}

TEST_CASE("small-nu expansion of the decaying root") {
    const double h = 1e-3;
    const cd r0 = rho_pm(0.0, kD).first, r1 = rho_pm(h, kD).first, r2 = rho_pm(-h, kD).first;
    const double d1 = ((r1 - r2) / (2.0 * h)).real();
    const double d2 = ((r1 - 2.0 * r0 + r2) / (h * h)).real() / 2.0;
    CHECK(std::abs(d1 - (-1.0 / kD.c_star)) < 1e-4);
    const double c3 = kD.c_star * kD.c_star * kD.c_star * std::exp(-kD.lambda_star);
    CHECK(std::abs(d2 - 1.0 / c3) < 1e-4);
}

TEST_CASE("spatial Green at j = 0 and the jump") {
    for (double nu : {0.5, 1.0, 3.0}) {
        const cd z = nu + 2.0 * kD.cosh_lambda;
        CHECK(std::abs(spatial_green(nu, 0, kD) - 1.0 / std::sqrt(z * z - 4.0)) < 1e-14);
    }
    CHECK(spatial_green(1e-9, 0, kD).real() == doctest::Approx(1.0 / kD.c_star).epsilon(1e-6));
    CHECK_THROWS_AS(spatial_green(-0.5, 0, kD), DomainError);
}

TEST_CASE("spatial Green matches a banded solve at nu = 1") {
    const long N = 400;
    const auto x = oracle::banded_resolvent(1.0, kD.lambda_star, N);
    for (long j = -20; j <= 20; ++j)
        CHECK(std::abs(spatial_green(1.0, j, kD) - x[static_cast<std::size_t>(j + N)]) < 1e-8);
}

TEST_CASE("spatial Green solves the resolvent equation") {
    const double el = std::exp(kD.lambda_star);
    for (cd nu : {cd(1.0, 0.0), cd(0.5, 2.0), cd(0.2, -7.0), cd(3.0, 30.0)}) {
        REQUIRE(in_exterior_resolvent(nu, kD));
        for (long j = -6; j <= 6; ++j) {
            const cd lhs = nu * spatial_green(nu, j, kD) -
                           (el * spatial_green(nu, j - 1, kD) - 2.0 * kD.cosh_lambda * spatial_green(nu, j, kD) +
                            spatial_green(nu, j + 1, kD) / el);
            CHECK(std::abs(lhs - (j == 0 ? 1.0 : 0.0)) < 1e-10);
        }
    }
}

TEST_CASE("contour defaults avoid the spectrum") {
    for (double t : {0.5, 1.0, 5.0, 20.0}) {
        const auto c = ContourSpec::for_time(t);
        CHECK(c.gamma0 == doctest::Approx(2.0 / t));
        CHECK(contour_avoids_spectrum(c, kD));
    }
    ContourSpec bad{-1.0, 0.25, 40.0, 3200};
    CHECK_FALSE(contour_avoids_spectrum(bad, kD));
    CHECK_THROWS_AS(laplace_invert(0, 1.0, kD, bad), DomainError);
    CHECK_THROWS_AS(laplace_invert(0, 100.0, kD, ContourSpec{1.0, 0.25, 40.0, 3200}), DomainError);
}

TEST_CASE("Laplace inversion agrees with the ODE and the Bessel form") {
    const auto s = run(200, {1.0, 2.0, 5.0});
    for (const auto& g : s) {
        const long c = std::lround(kD.c_star * g.t);
        for (long j = c - 10; j <= c + 10; ++j) {
            const auto r = laplace_invert_detail(j, g.t, kD, ContourSpec::for_time(g.t));
            CHECK(std::abs(r.value - g.at(j)) <= 1e-6);
            CHECK(std::abs(r.value - oracle::bessel_green(j, g.t, kD.lambda_star)) <= 1e-6);
            CHECK(r.imag_residual < 1e-8);
        }
    }
}

TEST_CASE("Laplace inversion conserves mass and decays to the left") {
    double m = 0.0;
    for (long j = -50; j <= 50; ++j) m += laplace_invert(j, 1.0, kD);
    CHECK(std::abs(m - 1.0) <= 1e-6);
    CHECK(std::abs(laplace_invert(-20, 1.0, kD)) < 1e-8);
}

TEST_CASE("Gaussian upper bound holds on a held-out time") {
    const auto s = run(1000, {50.0, 100.0, 200.0, 300.0}, ContaminationPolicy::Flag);
    const std::vector<GreenSnapshot> fit(s.begin(), s.begin() + 3);
    const auto r = gaussian_bound_check(fit, s[3], kD, 0.5);
    CHECK(r.beta == doctest::Approx(1.0 / (8.0 * kD.cosh_lambda)));
    CHECK(r.C > 0.0);
    CHECK(r.checked > 100);
    CHECK(r.violations == 0);
    CHECK(r.worst_ratio <= 1.0);
}
