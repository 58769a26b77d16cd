#pragma once

namespace latkpp {

/// Minimal-speed pair (c*, lambda*) of the lattice KPP equation and the
/// constants derived from it. Computed once, passed by value.
struct Dispersion {
    double fprime0 = 0.0;
    double c_star = 0.0;
    double lambda_star = 0.0;
    double cosh_lambda = 0.0;
    double Lambda_star = 0.0;    // 2 + c*^2/3
    double bramson_coeff = 0.0;  // 3 / (2 lambda*)

    /// |c* lambda* - (e^l - 2 + e^-l + f'(0))|
    double residual_speed() const;
    /// |c* - (e^l - e^-l)|
    double residual_sinh() const;
    /// sqrt(2 cosh(lambda*) t), the diffusive length at time t.
    double spread(double t) const;
};

inline constexpr double kDefaultDispersionTol = 1e-12;

/// Bisection on g(l) = l (e^l - e^-l) - (e^l - 2 + e^-l + f'(0)).
Dispersion solve_dispersion(double fprime0, double tol = kDefaultDispersionTol);

/// (e^l - 2 + e^-l + f'(0)) / l, whose minimum over l > 0 is c*.
double speed_quotient(double lambda, double fprime0);

/// exp(-x^2/2) / sqrt(2 pi)
double gaussian(double x);

/// Odd cubic correction (c* / (24 cosh^2 l*)) (x^3 - 3x).
double cubic_P(double x, const Dispersion& d);

/// Scaled position (j - c* t) / sqrt(2 cosh(l*) t).
double xi_of(double j, double t, const Dispersion& d);

/// Principal part [1/sqrt(2 cosh t) + P(xi)/t] g(xi) of the temporal Green's function.
double principal_H(long j, double t, const Dispersion& d);

}  // namespace latkpp
