#include "latkpp/green.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "latkpp/error.hpp"
#include "latkpp/lattice.hpp"

namespace latkpp {

double GreenSnapshot::at(long j) const noexcept {
    if (j < j_min || j > j_max()) return 0.0;
    return values[static_cast<std::size_t>(j - j_min)];
}

double GreenSnapshot::mass() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
}

double GreenSnapshot::min_value() const { return *std::min_element(values.begin(), values.end()); }

std::vector<GreenSnapshot> temporal_green(const Dispersion& d, long L, double dt,
                                          std::span<const double> sample_times, ContaminationPolicy policy) {
    if (L < 100) throw DomainError("temporal_green: L must be at least 100");
    if (!(dt > 0.0)) throw DomainError("temporal_green: dt must be positive");
    if (sample_times.empty()) return {};

    std::vector<std::size_t> steps;
    for (double t : sample_times) {
        if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("temporal_green: sample times must be positive");
        steps.push_back(static_cast<std::size_t>(std::max(1.0, std::round(t / dt))));
    }
    std::sort(steps.begin(), steps.end());
    steps.erase(std::unique(steps.begin(), steps.end()), steps.end());

    LatticeField field = LatticeField::delta(-L, L, 0);
    Rk4Stepper stepper(MovingFrame{d});
    std::vector<GreenSnapshot> out;
    out.reserve(steps.size());
    std::size_t done = 0;
    for (std::size_t target : steps) {
        for (; done < target; ++done) stepper.step(field, dt);
        field.t = static_cast<double>(target) * dt;
        if (!std::isfinite(field.sum())) throw BlowupError(target, field.j_min);

        GreenSnapshot s;
        s.t = field.t;
        s.j_min = field.j_min;
        s.values = field.values;
        s.boundary_magnitude = field.boundary_magnitude();
        s.contaminated = s.boundary_magnitude > kContaminationThreshold;
        if (s.contaminated && policy == ContaminationPolicy::Throw)
            throw ContaminationError(s.t, s.boundary_magnitude);
        out.push_back(std::move(s));
    }
    return out;
}

GreenDecomposition decompose(const GreenSnapshot& snap, const Dispersion& d) {
    GreenDecomposition dec;
    dec.t = snap.t;
    dec.j_min = snap.j_min;
    const std::size_t n = snap.values.size();
    dec.H.resize(n);
    dec.R.resize(n);
    dec.G = snap.values;
    dec.argmax_j = snap.j_min;
    for (std::size_t i = 0; i < n; ++i) {
        const long j = snap.j_min + static_cast<long>(i);
        dec.H[i] = principal_H(j, snap.t, d);
        dec.R[i] = dec.G[i] - dec.H[i];
        if (std::abs(dec.R[i]) > dec.E_sup) {
            dec.E_sup = std::abs(dec.R[i]);
            dec.argmax_j = j;
        }
    }
    return dec;
}

LinearFit slope_fit(std::span<const std::pair<double, double>> series, double t_min) {
    std::vector<double> x, y;
    for (const auto& [t, e] : series) {
        if (t < t_min) continue;
        if (!(t > 0.0) || !(e > 0.0)) throw DomainError("slope_fit: t and E must be positive");
        x.push_back(std::log(t));
        y.push_back(std::log(e));
    }
    if (x.size() < 5) throw InsufficientDataError("slope_fit: fewer than 5 usable points");
    return least_squares(x, y);
}

std::vector<PTildePoint> extract_P(const GreenSnapshot& snap, const Dispersion& d, double xi_window) {
    if (!(xi_window > 0.0) || xi_window > 3.0) throw DomainError("extract_P: xi_window must lie in (0, 3]");
    std::vector<PTildePoint> out;
    const double t = snap.t;
    const double s = d.spread(t);
    for (std::size_t i = 0; i < snap.values.size(); ++i) {
        const double xi = xi_of(static_cast<double>(snap.j_min + static_cast<long>(i)), t, d);
        if (std::abs(xi) > xi_window) continue;
        const double g = gaussian(xi);
        out.push_back({xi, t * (snap.values[i] - g / s) / g, cubic_P(xi, d)});
    }
    return out;
}

std::pair<std::complex<double>, std::complex<double>> rho_pm(std::complex<double> nu, const Dispersion& d) {
    const std::complex<double> z = nu + 2.0 * d.cosh_lambda;
    const std::complex<double> s = std::sqrt(z * z - 4.0);
    const double two_eml = 2.0 * std::exp(-d.lambda_star);
    return {(z - s) / two_eml, (z + s) / two_eml};
}

namespace {

struct OrderedRoots {
    std::complex<double> small, large, sqrt_disc;
};

OrderedRoots ordered_roots(std::complex<double> nu, const Dispersion& d) {
    const std::complex<double> z = nu + 2.0 * d.cosh_lambda;
    std::complex<double> s = std::sqrt(z * z - 4.0);
    const double two_eml = 2.0 * std::exp(-d.lambda_star);
    std::complex<double> lo = (z - s) / two_eml, hi = (z + s) / two_eml;
    if (std::abs(lo) > std::abs(hi)) {
        std::swap(lo, hi);
        s = -s;
    }
    return {lo, hi, s};
}

}  // namespace

bool in_exterior_resolvent(std::complex<double> nu, const Dispersion& d) {
    const auto r = ordered_roots(nu, d);
    return std::abs(r.small) < 1.0 && std::abs(r.large) > 1.0;
}

std::complex<double> spatial_green(std::complex<double> nu, long j, const Dispersion& d) {
    const auto r = ordered_roots(nu, d);
    if (!(std::abs(r.small) < 1.0 && std::abs(r.large) > 1.0))
        throw DomainError("spatial_green: nu is not in the exterior resolvent set");
    const std::complex<double> psi = 1.0 / r.sqrt_disc;
    if (j == 0) return psi;
    return j > 0 ? psi * std::pow(r.small, static_cast<int>(j)) : psi * std::pow(r.large, static_cast<int>(j));
}

namespace {

constexpr std::array<double, 8> kGlNodes = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                            -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                            0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeights = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                              0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};

void check_contour(const ContourSpec& c) {
    if (!(c.gamma1 > 0.0) || !(c.xi_max > 0.0) || c.n_nodes <= 0 || c.n_nodes % 16 != 0)
        throw DomainError("ContourSpec: need gamma1 > 0, xi_max > 0 and n_nodes a positive multiple of 16");
}

// Visits every node of the upper half (s >= 0) with its weight; the lower
// half is its mirror image.
template <class Fn>
void for_each_node(const ContourSpec& c, Fn fn) {
    const int panels = c.n_nodes / 16;
    const double h = c.xi_max / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h;
        for (std::size_t k = 0; k < kGlNodes.size(); ++k) fn(mid + 0.5 * h * kGlNodes[k], 0.5 * h * kGlWeights[k]);
    }
}

bool outside_ellipse(std::complex<double> nu, const Dispersion& d) {
    const double a = 2.0 * d.cosh_lambda;
    const double x = (nu.real() + a) / a;
    const double y = nu.imag() / d.c_star;
    return x * x + y * y > 1.0;
}

}  // namespace

ContourSpec ContourSpec::for_time(double t) {
    if (!(t > 0.0)) throw DomainError("ContourSpec::for_time: t must be positive");
    ContourSpec c;
    c.gamma0 = 2.0 / t;
    c.gamma1 = 0.25;
    c.xi_max = std::max(40.0, 45.0 / (c.gamma1 * t));
    c.n_nodes = 3200;
    return c;
}

bool contour_avoids_spectrum(const ContourSpec& contour, const Dispersion& d) {
    check_contour(contour);
    bool ok = outside_ellipse({contour.gamma0, 0.0}, d);
    for_each_node(contour, [&](double s, double) {
        const std::complex<double> nu(contour.gamma0 - contour.gamma1 * s, s);
        ok = ok && outside_ellipse(nu, d) && outside_ellipse(std::conj(nu), d);
    });
    return ok;
}

LaplaceResult laplace_invert_detail(long j, double t, const Dispersion& d, const ContourSpec& contour) {
    if (!(t > 0.0)) throw DomainError("laplace_invert: t must be positive");
    check_contour(contour);
    if (t * contour.gamma0 > 50.0) throw DomainError("laplace_invert: t * gamma0 exceeds 50");
    if (!contour_avoids_spectrum(contour, d)) throw DomainError("laplace_invert: contour meets the spectrum");

    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> dnu_upper(-contour.gamma1, 1.0), dnu_lower(contour.gamma1, 1.0);
    std::complex<double> acc = 0.0;
    for_each_node(contour, [&](double s, double w) {
        const std::complex<double> up(contour.gamma0 - contour.gamma1 * s, s);
        const std::complex<double> lo = std::conj(up);
        acc += w * (std::exp(up * t) * spatial_green(up, j, d) * dnu_upper +
                    std::exp(lo * t) * spatial_green(lo, j, d) * dnu_lower);
    });
    const std::complex<double> v = acc / (2.0 * std::numbers::pi * i);
    LaplaceResult r{v.real(), std::abs(v.imag())};
    if (!(r.imag_residual < 1e-8))
        throw QuadratureError("laplace_invert: imaginary residual " + std::to_string(r.imag_residual));
    return r;
}

double laplace_invert(long j, double t, const Dispersion& d, const ContourSpec& contour) {
    return laplace_invert_detail(j, t, d, contour).value;
}

double laplace_invert(long j, double t, const Dispersion& d) {
    return laplace_invert(j, t, d, ContourSpec::for_time(t));
}

GaussianBoundReport gaussian_bound_check(std::span<const GreenSnapshot> fit, const GreenSnapshot& held_out,
                                         const Dispersion& d, double theta) {
    if (!(theta > 0.0)) throw DomainError("gaussian_bound_check: theta must be positive");
    if (fit.empty()) throw InsufficientDataError("gaussian_bound_check: no fitting snapshots");
    GaussianBoundReport rep;
    rep.theta = theta;
    rep.beta = 1.0 / (8.0 * d.cosh_lambda);

    auto scan = [&](const GreenSnapshot& s, auto&& visit) {
        if (s.t < 1.0) throw DomainError("gaussian_bound_check: snapshots must have t >= 1");
        const double ct = d.c_star * s.t;
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            const double x = static_cast<double>(s.j_min + static_cast<long>(i)) - ct;
            if (std::abs(x) > theta * s.t) continue;
            visit(std::abs(s.values[i]) * std::sqrt(s.t) * std::exp(rep.beta * x * x / s.t));
        }
    };
    for (const auto& s : fit) scan(s, [&](double c) { rep.C = std::max(rep.C, c); });
    scan(held_out, [&](double c) {
        ++rep.checked;
        const double ratio = c / rep.C;
        rep.worst_ratio = std::max(rep.worst_ratio, ratio);
        if (ratio > 1.0) ++rep.violations;
    });
    return rep;
}

}  // namespace latkpp
