#pragma once

// Reference computations that share no code with the library.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace oracle {

/// c* and lambda* by golden-section minimization of the speed quotient.
inline std::pair<double, double> min_speed(double fprime0) {
    auto q = [&](double l) { return (std::exp(l) - 2.0 + std::exp(-l) + fprime0) / l; };
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 1e-3, b = 20.0;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    for (int it = 0; it < 200; ++it) {
        if (q(x1) < q(x2)) {
            b = x2;
            x2 = x1;
            x1 = b - g * (b - a);
        } else {
            a = x1;
            x1 = x2;
            x2 = a + g * (b - a);
        }
    }
    const double l = 0.5 * (a + b);
    return {q(l), l};
}

/// Exact comoving Green's function e^{-2 cosh(l) t} e^{l j} I_|j|(2t).
/// Fine for moderate t; I_n(2t) overflows beyond t ~ 350.
inline double bessel_green(long j, double t, double lambda) {
    const double n = static_cast<double>(j < 0 ? -j : j);
    return std::exp(-2.0 * std::cosh(lambda) * t + lambda * static_cast<double>(j)) * std::cyl_bessel_i(n, 2.0 * t);
}

/// Solves (nu I - L) G = delta_0 on [-N, N] with zero Dirichlet data by the
/// Thomas algorithm, L = e^l S_- - 2 cosh(l) + e^-l S_+.
inline std::vector<std::complex<double>> banded_resolvent(std::complex<double> nu, double lambda, long N) {
    using C = std::complex<double>;
    const auto n = static_cast<std::size_t>(2 * N + 1);
    const C lower = -std::exp(lambda), upper = -std::exp(-lambda);
    const C diag = nu + 2.0 * std::cosh(lambda);
    std::vector<C> cp(n), dp(n), x(n);
    for (std::size_t i = 0; i < n; ++i) {
        const C rhs = (static_cast<long>(i) - N == 0) ? C(1.0) : C(0.0);
        const C denom = i == 0 ? diag : diag - lower * cp[i - 1];
        cp[i] = upper / denom;
        dp[i] = (rhs - (i == 0 ? C(0.0) : lower * dp[i - 1])) / denom;
    }
    x[n - 1] = dp[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = dp[i] - cp[i] * x[i + 1];
    return x;
}

/// Composite Gauss-Legendre (5 points) of f over [a, b] with n panels.
template <class F>
double gauss5(F&& f, double a, double b, int n) {
    static const double xs[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640, 0.9061798459386640};
    static const double ws[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                                 0.2369268850561891};
    const double h = (b - a) / n;
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
        const double m = a + (k + 0.5) * h;
        for (int i = 0; i < 5; ++i) s += ws[i] * f(m + 0.5 * h * xs[i]);
    }
    return 0.5 * h * s;
}

}  // namespace oracle
