#include "latkpp/dispersion.hpp"

#include <cmath>
#include <numbers>

#include "latkpp/error.hpp"

namespace latkpp {

namespace {

double stationarity(double l, double fprime0) {
    // l (e^l - e^-l) - (e^l - 2 + e^-l + f'(0)), written with sinh/cosh to
    // avoid cancellation near 0.
    const double s = std::sinh(0.5 * l);
    return 2.0 * l * std::sinh(l) - 4.0 * s * s - fprime0;
}

}  // namespace

double Dispersion::residual_speed() const {
    const double s = std::sinh(0.5 * lambda_star);
    return std::abs(c_star * lambda_star - (4.0 * s * s + fprime0));
}

double Dispersion::residual_sinh() const {
    return std::abs(c_star - (std::exp(lambda_star) - std::exp(-lambda_star)));
}

double Dispersion::spread(double t) const { return std::sqrt(2.0 * cosh_lambda * t); }

Dispersion solve_dispersion(double fprime0, double tol) {
    if (!(fprime0 > 0.0) || !std::isfinite(fprime0))
        throw DomainError("solve_dispersion: fprime0 must be positive");
    if (!(tol > 0.0)) throw DomainError("solve_dispersion: tol must be positive");

    double lo = 1e-6, hi = 10.0;
    while (stationarity(hi, fprime0) <= 0.0) {
        hi *= 2.0;
        if (hi > 50.0) throw ConvergenceError("solve_dispersion: bracket expansion passed lambda = 50");
    }
    if (stationarity(lo, fprime0) >= 0.0)
        throw ConvergenceError("solve_dispersion: fprime0 too small to bracket the root");

    // g is increasing with g'(l) = 2 l cosh l, so the residual of the first
    // equation is controlled by the bracket width.
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double g = stationarity(mid, fprime0);
        if (g == 0.0) {
            lo = hi = mid;
            break;
        }
        (g < 0.0 ? lo : hi) = mid;
    }
    const double l = std::abs(stationarity(lo, fprime0)) <= std::abs(stationarity(hi, fprime0)) ? lo : hi;

    Dispersion d;
    d.fprime0 = fprime0;
    d.lambda_star = l;
    d.c_star = std::exp(l) - std::exp(-l);
    d.cosh_lambda = std::cosh(l);
    d.Lambda_star = 2.0 + d.c_star * d.c_star / 3.0;
    d.bramson_coeff = 1.5 / l;
    if (d.residual_speed() > tol || d.residual_sinh() > tol)
        throw ConvergenceError("solve_dispersion: residual above tolerance");
    return d;
}

double speed_quotient(double lambda, double fprime0) {
    if (!(lambda > 0.0)) throw DomainError("speed_quotient: lambda must be positive");
    const double s = std::sinh(0.5 * lambda);
    return (4.0 * s * s + fprime0) / lambda;
}

double gaussian(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double cubic_P(double x, const Dispersion& d) {
    return d.c_star / (24.0 * d.cosh_lambda * d.cosh_lambda) * x * (x * x - 3.0);
}

double xi_of(double j, double t, const Dispersion& d) { return (j - d.c_star * t) / d.spread(t); }

double principal_H(long j, double t, const Dispersion& d) {
    if (!(t > 0.0)) throw DomainError("principal_H: t must be positive");
    const double xi = xi_of(static_cast<double>(j), t, d);
    return (1.0 / d.spread(t) + cubic_P(xi, d) / t) * gaussian(xi);
}

}  // namespace latkpp
