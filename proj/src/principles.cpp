#include "latkpp/principles.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "latkpp/barriers.hpp"
#include "latkpp/error.hpp"

namespace latkpp {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

// a (1 + sin(w t + phi)) with random a in [0, amp]: nonnegative, smooth in t.
struct Wave {
    std::vector<double> a, w, phi;
    Wave(Rng& rng, std::size_t n, double amp) {
        for (std::size_t i = 0; i < n; ++i) {
            a.push_back(uniform(rng, 0.0, amp));
            w.push_back(uniform(rng, 0.5, 6.0));
            phi.push_back(uniform(rng, 0.0, 6.283185307179586));
        }
    }
    double operator()(std::size_t i, double t) const { return a[i] * (1.0 + std::sin(w[i] * t + phi[i])); }
};

struct Domain {
    Boundary zeta, xi;  // xi empty: single boundary
    bool contains(double j, double t) const { return j >= zeta(t) && (!xi || j <= xi(t)); }
    // Strip [zeta - 1, zeta) where corruption is injected.
    bool left_strip(double j, double t) const {
        const double z = zeta(t);
        return j >= z - 1.0 && j < z;
    }
};

// RK4 on a vector whose per-index right-hand side depends on whether the
// index is inside the domain; membership is frozen at the start of a step.
template <class Rhs>
void rk4(std::vector<double>& v, double t, double dt, Rhs rhs) {
    const std::size_t n = v.size();
    std::vector<double> k1(n), k2(n), k3(n), k4(n), s(n);
    rhs(v, t, k1);
    for (std::size_t i = 0; i < n; ++i) s[i] = v[i] + 0.5 * dt * k1[i];
    rhs(s, t + 0.5 * dt, k2);
    for (std::size_t i = 0; i < n; ++i) s[i] = v[i] + 0.5 * dt * k2[i];
    rhs(s, t + 0.5 * dt, k3);
    for (std::size_t i = 0; i < n; ++i) s[i] = v[i] + dt * k3[i];
    rhs(s, t + dt, k4);
    for (std::size_t i = 0; i < n; ++i) v[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

double apply_L(const std::vector<double>& v, std::size_t i, double el, double ch2, double eml) {
    const double left = i > 0 ? v[i - 1] : 0.0;
    const double right = i + 1 < v.size() ? v[i + 1] : 0.0;
    return el * left - ch2 * v[i] + eml * right;
}

bool check_config(const PrincipleConfig& cfg, PrincipleReport& rep) {
    if (cfg.j_max <= cfg.j_min || !(cfg.dt > 0.0) || !(cfg.T > 0.0)) {
        rep.skipped = true;
        rep.reason = "invalid window or time grid";
        return false;
    }
    return true;
}

PrincipleReport run_max_principle(std::uint64_t seed, const Domain& dom, const Dispersion& d,
                                  const PrincipleConfig& cfg, Corruption corruption, bool zero) {
    PrincipleReport rep;
    rep.seed = seed;
    if (!check_config(cfg, rep)) return rep;
    const auto n_steps = static_cast<std::size_t>(std::llround(cfg.T / cfg.dt));
    const double z0 = dom.zeta(0.0);
    for (std::size_t k = 0; k <= n_steps; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        if (!dom.xi && dom.zeta(t) < z0 - 1.0) {
            rep.skipped = true;
            rep.reason = "zeta(t) < zeta(0) - 1 at t = " + std::to_string(t);
            return rep;
        }
        if (dom.xi && dom.xi(t) < dom.zeta(t)) {
            rep.skipped = true;
            rep.reason = "xi(t) < zeta(t) at t = " + std::to_string(t);
            return rep;
        }
    }

    Rng rng(seed);
    const auto n = static_cast<std::size_t>(cfg.j_max - cfg.j_min + 1);
    const double amp = zero ? 0.0 : 1.0;
    std::vector<double> z(n);
    for (auto& v : z) v = -uniform(rng, 0.0, amp);
    const Wave slack(rng, n, amp), drift(rng, n, amp);
    const double el = std::exp(d.lambda_star), eml = std::exp(-d.lambda_star), ch2 = 2.0 * d.cosh_lambda;

    std::vector<char> inside(n), strip(n);
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        for (std::size_t i = 0; i < n; ++i) {
            const double j = static_cast<double>(cfg.j_min + static_cast<long>(i));
            inside[i] = dom.contains(j, t);
            strip[i] = dom.left_strip(j, t);
            if (corruption == Corruption::PositiveBoundary && strip[i]) z[i] = 1.0;
        }
        rk4(z, t, cfg.dt, [&](const std::vector<double>& v, double s, std::vector<double>& out) {
            for (std::size_t i = 0; i < n; ++i) {
                if (inside[i])
                    out[i] = apply_L(v, i, el, ch2, eml) - slack(i, s);
                else if (corruption == Corruption::PositiveBoundary && strip[i])
                    out[i] = 0.0;
                else
                    out[i] = -drift(i, s);
            }
        });
        const double t1 = static_cast<double>(k + 1) * cfg.dt;
        for (std::size_t i = 0; i < n; ++i) {
            if (!dom.contains(static_cast<double>(cfg.j_min + static_cast<long>(i)), t1)) continue;
            ++rep.checks;
            rep.worst = std::max(rep.worst, z[i]);
            if (z[i] > cfg.tolerance) ++rep.violations;
        }
    }
    return rep;
}

}  // namespace

Boundary random_boundary(std::uint64_t seed, double lo, double hi) {
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    const double z0 = uniform(rng, lo, hi);
    const double v = uniform(rng, 0.0, 3.0);
    const double A = uniform(rng, 0.0, 0.5);
    const double w = uniform(rng, 0.5, 5.0);
    return [=](double t) { return z0 + v * t + A * std::sin(w * t); };
}

std::pair<Boundary, Boundary> random_boundary_pair(std::uint64_t seed, double lo, double hi) {
    Boundary zeta = random_boundary(seed, lo, hi);
    Rng rng(seed ^ 0x3c6ef372fe94f82bULL);
    const double W = uniform(rng, 4.0, 12.0);
    const double B = uniform(rng, 0.0, 2.0);
    const double w = uniform(rng, 0.5, 5.0);
    const double phi = uniform(rng, 0.0, 6.283185307179586);
    Boundary xi = [=](double t) { return zeta(t) + W + B * std::sin(w * t + phi); };
    return {zeta, xi};
}

PrincipleReport max_principle_test(std::uint64_t seed, const Boundary& zeta, const Dispersion& d,
                                   const PrincipleConfig& cfg, Corruption corruption, bool zero) {
    if (!zeta) throw DomainError("max_principle_test: missing boundary");
    return run_max_principle(seed, Domain{zeta, {}}, d, cfg, corruption, zero);
}

PrincipleReport max_principle_test2(std::uint64_t seed, const Boundary& zeta, const Boundary& xi, const Dispersion& d,
                                    const PrincipleConfig& cfg, Corruption corruption, bool zero) {
    if (!zeta || !xi) throw DomainError("max_principle_test2: missing boundary");
    return run_max_principle(seed, Domain{zeta, xi}, d, cfg, corruption, zero);
}

PrincipleReport comparison_test(std::uint64_t seed, bool two_boundaries, const Dispersion& d,
                                const ReactionSpec& reaction, const PrincipleConfig& cfg, bool identical) {
    PrincipleReport rep;
    rep.seed = seed;
    if (!check_config(cfg, rep)) return rep;
    const double lo = static_cast<double>(cfg.j_min) + 2.0, hi = lo + 10.0;
    Domain dom;
    if (two_boundaries) {
        auto [z, x] = random_boundary_pair(seed, lo, hi);
        dom = Domain{z, x};
    } else {
        dom = Domain{random_boundary(seed, lo, hi), {}};
    }

    Rng rng(seed);
    const auto n = static_cast<std::size_t>(cfg.j_max - cfg.j_min + 1);
    std::vector<double> upper(n), lower(n);
    for (std::size_t i = 0; i < n; ++i) {
        upper[i] = uniform(rng, 0.0, 2.0);
        lower[i] = identical ? upper[i] : upper[i] - uniform(rng, 0.0, 0.5);
    }
    const double amp = identical ? 0.0 : 1.0;
    const Wave up_force(rng, n, amp), low_force(rng, n, amp), strip_gap(rng, n, amp);
    const Wave strip_a(rng, n, 1.0), strip_b(rng, n, 1.0);
    const double el = std::exp(d.lambda_star), eml = std::exp(-d.lambda_star), ch2 = 2.0 * d.cosh_lambda;

    const auto n_steps = static_cast<std::size_t>(std::llround(cfg.T / cfg.dt));
    std::vector<char> inside(n);
    auto step = [&](std::vector<double>& v, double t, int sign, const Wave& force, bool with_gap) {
        rk4(v, t, cfg.dt, [&](const std::vector<double>& s, double tt, std::vector<double>& out) {
            for (std::size_t i = 0; i < n; ++i) {
                const double j = static_cast<double>(cfg.j_min + static_cast<long>(i));
                if (inside[i]) {
                    out[i] = apply_L(s, i, el, ch2, eml) - nonlinear_R(j, tt, s[i], reaction, d) +
                             sign * force(i, tt);
                } else {
                    // Shared signed drift on the strip; the upper member adds a nonnegative gap.
                    out[i] = strip_a(i, tt) - strip_b(i, tt) + (with_gap ? strip_gap(i, tt) : 0.0);
                }
            }
        });
    };
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        for (std::size_t i = 0; i < n; ++i)
            inside[i] = dom.contains(static_cast<double>(cfg.j_min + static_cast<long>(i)), t);
        step(upper, t, +1, up_force, true);
        step(lower, t, -1, low_force, false);
        const double t1 = t + cfg.dt;
        for (std::size_t i = 0; i < n; ++i) {
            if (!dom.contains(static_cast<double>(cfg.j_min + static_cast<long>(i)), t1)) continue;
            ++rep.checks;
            const double gap = lower[i] - upper[i];
            rep.worst = std::max(rep.worst, gap);
            if (gap > cfg.tolerance) ++rep.violations;
        }
    }
    return rep;
}

}  // namespace latkpp
