#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "latkpp/dispersion.hpp"
#include "latkpp/fit.hpp"

namespace latkpp {

/// Truncation is flagged once the window edges carry more than this.
inline constexpr double kContaminationThreshold = 1e-10;

struct GreenSnapshot {
    double t = 0.0;
    long j_min = 0;
    std::vector<double> values;
    double boundary_magnitude = 0.0;
    bool contaminated = false;

    long j_max() const noexcept { return j_min + static_cast<long>(values.size()) - 1; }
    double at(long j) const noexcept;
    double mass() const;
    double min_value() const;
};

enum class ContaminationPolicy { Throw, Flag };

/// Integrates the comoving linearization from a delta at j = 0 on [-L, L]
/// with zero clamps and records snapshots at the requested times (rounded
/// to the nearest step). Under Throw a snapshot whose edge magnitude
/// exceeds kContaminationThreshold raises ContaminationError; under Flag it
/// is marked and returned.
std::vector<GreenSnapshot> temporal_green(const Dispersion& d, long L, double dt,
                                          std::span<const double> sample_times,
                                          ContaminationPolicy policy = ContaminationPolicy::Throw);

struct GreenDecomposition {
    double t = 0.0;
    long j_min = 0;
    std::vector<double> H, G, R;
    double E_sup = 0.0;
    long argmax_j = 0;
};

GreenDecomposition decompose(const GreenSnapshot& snap, const Dispersion& d);

/// OLS of ln E against ln t over points with t >= t_min (at least 5).
LinearFit slope_fit(std::span<const std::pair<double, double>> series, double t_min);

struct PTildePoint {
    double xi = 0.0;
    double p_tilde = 0.0;
    double p_exact = 0.0;
};

/// t [G - g(xi)/sqrt(2 cosh t)] / g(xi) for |xi| <= xi_window (<= 3).
std::vector<PTildePoint> extract_P(const GreenSnapshot& snap, const Dispersion& d, double xi_window);

/// Roots (rho_minus, rho_plus) of e^-l rho^2 - (nu + 2 cosh l) rho + e^l = 0
/// using the principal square root, exactly as written.
std::pair<std::complex<double>, std::complex<double>> rho_pm(std::complex<double> nu, const Dispersion& d);

/// True when the smaller root has modulus < 1 and the larger > 1.
bool in_exterior_resolvent(std::complex<double> nu, const Dispersion& d);

/// Resolvent kernel ((nu - L)^-1 delta)_j. Roots are ordered by modulus, so
/// the formula stays on the decaying branch wherever the principal root
/// would flip. Throws DomainError on or inside the spectral ellipse.
std::complex<double> spatial_green(std::complex<double> nu, long j, const Dispersion& d);

/// Sectorial contour gamma0 - gamma1 |s| + i s, |s| <= xi_max, sampled by
/// Gauss-Legendre panels on each half (n_nodes must be a multiple of 16).
struct ContourSpec {
    double gamma0 = 0.0;
    double gamma1 = 0.25;
    double xi_max = 40.0;
    int n_nodes = 3200;

    /// gamma0 = 2/t, gamma1 = 0.25, xi_max = max(40, 45 / (gamma1 t)).
    static ContourSpec for_time(double t);
};

/// Whether every quadrature node lies outside the spectral ellipse.
bool contour_avoids_spectrum(const ContourSpec& contour, const Dispersion& d);

struct LaplaceResult {
    double value = 0.0;
    double imag_residual = 0.0;
};

/// (1 / 2 pi i) int e^{nu t} G_j(nu) d nu along the contour.
/// Throws QuadratureError when the imaginary part reaches 1e-8.
LaplaceResult laplace_invert_detail(long j, double t, const Dispersion& d, const ContourSpec& contour);
double laplace_invert(long j, double t, const Dispersion& d, const ContourSpec& contour);
double laplace_invert(long j, double t, const Dispersion& d);

struct GaussianBoundReport {
    double C = 0.0;
    double beta = 0.0;
    double theta = 0.0;
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst_ratio = 0.0;  // max of |G| / bound on the held-out snapshot
};

/// Fits the smallest C with beta = 1/(8 cosh l) such that
/// |G_j(t)| <= C t^{-1/2} exp(-beta (j - c t)^2 / t) over |j - c t| <= theta t
/// on `fit`, then counts violations on `held_out`.
GaussianBoundReport gaussian_bound_check(std::span<const GreenSnapshot> fit, const GreenSnapshot& held_out,
                                         const Dispersion& d, double theta);

}  // namespace latkpp
