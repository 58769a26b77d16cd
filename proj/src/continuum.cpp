#include "latkpp/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "latkpp/error.hpp"
#include "latkpp/fit.hpp"

namespace latkpp {

namespace {

struct SimpsonState {
    const std::function<double(double)>& f;
    double tol;
};

double simpson_rec(const SimpsonState& s, double a, double b, double fa, double fm, double fb, double whole,
                   double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = s.f(lm), frm = s.f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
    if (depth <= 0) throw QuadratureError("adaptive_simpson: recursion depth exhausted");
    return simpson_rec(s, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
           simpson_rec(s, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    if (!(rel_tol > 0.0)) throw DomainError("adaptive_simpson: rel_tol must be positive");
    if (a == b) return 0.0;
    // A coarse composite pass sets the scale for the relative tolerance and
    // keeps narrow features from being missed by the first subdivision.
    constexpr int kPanels = 16;
    const double h = (b - a) / kPanels;
    double coarse = 0.0;
    std::vector<double> fx(2 * kPanels + 1);
    for (int i = 0; i <= 2 * kPanels; ++i) fx[static_cast<std::size_t>(i)] = f(a + 0.5 * h * i);
    for (int p = 0; p < kPanels; ++p) {
        const auto i = static_cast<std::size_t>(2 * p);
        coarse += std::abs(h / 6.0 * (fx[i] + 4.0 * fx[i + 1] + fx[i + 2]));
    }
    const double eps = std::max(rel_tol * coarse, 1e-300) / kPanels;
    const SimpsonState s{f, rel_tol};
    double total = 0.0;
    for (int p = 0; p < kPanels; ++p) {
        const auto i = static_cast<std::size_t>(2 * p);
        const double pa = a + h * p, pb = pa + h;
        const double whole = h / 6.0 * (fx[i] + 4.0 * fx[i + 1] + fx[i + 2]);
        total += simpson_rec(s, pa, pb, fx[i], fx[i + 1], fx[i + 2], whole, eps, 40);
    }
    return total;
}

OddData OddData::indicator(double Z) {
    if (!(Z > 0.0)) throw DomainError("OddData::indicator: Z must be positive");
    OddData d;
    d.p0 = [Z](double z) { return z >= 0.0 && z <= Z ? 1.0 : 0.0; };
    d.support = Z;
    d.moment1 = 0.5 * Z * Z;
    return d;
}

OddData OddData::from_function(std::function<double(double)> p0, double Z) {
    if (!(Z > 0.0) || !p0) throw DomainError("OddData::from_function: need Z > 0 and a function");
    OddData d;
    d.support = Z;
    d.moment1 = adaptive_simpson([&p0](double z) { return z * p0(z); }, 0.0, Z);
    d.p0 = std::move(p0);
    return d;
}

double heat_odd_solution(double t, double y, const OddData& data) {
    if (!(t > 0.0)) throw DomainError("heat_odd_solution: t must be positive");
    if (y == 0.0) return 0.0;
    const double ay = std::abs(y);
    // e^{-(y-z)^2/4t} - e^{-(y+z)^2/4t} = e^{-(y-z)^2/4t} (1 - e^{-yz/t}), no cancellation.
    auto kernel = [&](double z) {
        const double d = ay - z;
        return std::exp(-d * d / (4.0 * t)) * -std::expm1(-ay * z / t) * data.p0(z);
    };
    const double v = adaptive_simpson(kernel, 0.0, data.support) / std::sqrt(4.0 * std::numbers::pi * t);
    return y > 0.0 ? v : -v;
}

double asymptotic_ratio(double t, double y, const OddData& data) {
    if (y == 0.0) throw DomainError("asymptotic_ratio: y must be nonzero");
    if (!(t > 0.0) || std::abs(y) > std::sqrt(t)) throw DomainError("asymptotic_ratio: need |y| <= sqrt(t)");
    return heat_odd_solution(t, y, data) * std::pow(t, 1.5) / (y * std::exp(-y * y / (4.0 * t)));
}

double asymptotic_constant(const OddData& data) { return data.moment1 / (2.0 * std::sqrt(std::numbers::pi)); }

ContinuumBramsonResult continuous_bramson(const ReactionSpec& reaction, double dx, double X, double dt, double T,
                                          double m, const ContinuumOptions& opt) {
    const double c = 2.0 * std::sqrt(reaction.fprime0());
    if (!(dx > 0.0) || dx > 0.1) throw DomainError("continuous_bramson: dx must lie in (0, 0.1]");
    if (!(T > 0.0)) throw DomainError("continuous_bramson: T must be positive");
    if (X < c * T + 10.0 * std::sqrt(T)) throw DomainError("continuous_bramson: X must be at least c* T + 10 sqrt(T)");
    if (!(dt > 0.0) || dt > 0.5 * dx * dx) throw DomainError("continuous_bramson: dt must lie in (0, dx^2 / 2]");
    if (!(m > 0.0 && m < 1.0)) throw DomainError("continuous_bramson: m must lie in (0, 1)");
    if (!(opt.half_width > 10.0)) throw DomainError("continuous_bramson: half width too small");

    const auto n_steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
    dt = T / static_cast<double>(n_steps);
    const auto every = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(opt.sample_every / dt)));

    const auto n = static_cast<std::size_t>(std::llround(2.0 * opt.half_width / dx)) + 1;
    long off = -std::llround(opt.half_width / dx);  // x_i = (off + i) dx
    constexpr std::size_t g = 2;                     // ghost cells per side
    std::vector<double> u(n + 2 * g), stage(n + 2 * g), k1(n), k2(n), k3(n), k4(n);
    for (std::size_t i = 0; i < g; ++i) {
        u[i] = stage[i] = 1.0;
        u[n + g + i] = stage[n + g + i] = 0.0;
    }
    const double smooth = std::sqrt(std::max(opt.smoothing_time, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(off + static_cast<long>(i)) * dx;
        u[g + i] = smooth > 0.0 ? 0.5 * std::erfc(x / (2.0 * smooth)) : (x <= 0.0 ? 1.0 : 0.0);
    }

    const double inv = 1.0 / (12.0 * dx * dx);
    auto eval = [&](const std::vector<double>& v, std::vector<double>& out) {
        for (std::size_t i = 0; i < n; ++i) {
            const double* p = &v[i + g];
            out[i] = (-p[-2] + 16.0 * p[-1] - 30.0 * p[0] + 16.0 * p[1] - p[2]) * inv + reaction(p[0]);
        }
    };
    auto level_index = [&]() -> std::size_t {
        std::size_t i = n;
        while (i > 0 && u[g + i - 1] < m) --i;
        if (i == 0 || i == n) throw NotFoundError("continuous_bramson: level left the window");
        return i - 1;
    };

    ContinuumBramsonResult r;
    r.m = m;
    r.c_star = c;
    r.theory = 3.0 / c;
    r.min_value = INFINITY;
    r.max_value = -INFINITY;
    for (std::size_t s = 1; s <= n_steps; ++s) {
        eval(u, k1);
        for (std::size_t i = 0; i < n; ++i) stage[g + i] = u[g + i] + 0.5 * dt * k1[i];
        eval(stage, k2);
        for (std::size_t i = 0; i < n; ++i) stage[g + i] = u[g + i] + 0.5 * dt * k2[i];
        eval(stage, k3);
        for (std::size_t i = 0; i < n; ++i) stage[g + i] = u[g + i] + dt * k3[i];
        eval(stage, k4);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = u[g + i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            u[g + i] = std::abs(v) < std::numeric_limits<double>::min() ? 0.0 : v;
        }

        std::size_t i = level_index();
        if (i > n / 2) {
            const std::size_t shift = i - n / 2;
            std::copy(u.begin() + static_cast<long>(g + shift), u.begin() + static_cast<long>(g + n),
                      u.begin() + static_cast<long>(g));
            std::fill(u.begin() + static_cast<long>(g + n - shift), u.begin() + static_cast<long>(g + n), 0.0);
            off += static_cast<long>(shift);
            i -= shift;
            if (static_cast<double>(off + static_cast<long>(n)) * dx > X)
                throw DomainError("continuous_bramson: front reached X");
        }
        if (s % every == 0) {
            if (!std::isfinite(u[g + i])) throw BlowupError(s, off + static_cast<long>(i));
            for (std::size_t k = 0; k < n; ++k) {
                r.min_value = std::min(r.min_value, u[g + k]);
                r.max_value = std::max(r.max_value, u[g + k]);
                if (k > 0 && u[g + k] > u[g + k - 1]) {
                    r.monotone = false;
                    r.monotone_violation = std::max(r.monotone_violation, u[g + k] - u[g + k - 1]);
                }
            }
            const double x = (static_cast<double>(off + static_cast<long>(i)) + (u[g + i] - m) / (u[g + i] - u[g + i + 1])) * dx;
            r.trace.emplace_back(static_cast<double>(s) * dt, x);
        }
    }

    const double t_hi = opt.t_fit_max > 0.0 ? opt.t_fit_max : T;
    std::vector<double> lx, ly;
    for (const auto& [t, x] : r.trace)
        if (t >= opt.t_fit_min && t <= t_hi + 1e-9) {
            lx.push_back(std::log(t));
            ly.push_back(c * t - x);
        }
    if (lx.size() < 20) throw InsufficientDataError("continuous_bramson: fewer than 20 samples in the fit window");
    const auto f = least_squares(lx, ly);
    r.a_hat = f.slope;
    r.b_hat = f.intercept;
    r.r2 = f.r2;
    r.slope_stderr = f.slope_stderr;
    return r;
}

ContinuumBramsonResult continuous_bramson(double fprime0, double dx, double X, double dt, double T, double m,
                                          const ContinuumOptions& opt) {
    return continuous_bramson(make_logistic(fprime0), dx, X, dt, T, m, opt);
}

}  // namespace latkpp
