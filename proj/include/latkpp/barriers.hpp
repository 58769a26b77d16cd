#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "latkpp/dispersion.hpp"
#include "latkpp/lattice.hpp"
#include "latkpp/reaction.hpp"

namespace latkpp {

struct BarrierParams {
    double delta = 0.05;
    double beta = 0.15;
    double alpha = 0.45;
    double eta = 0.25;  // beta + epsilon
    double eta1 = 0.0;
    double eta2 = 0.0;
    double a = 2.0;
    double A = 2.5;
    LatticeField w0;
    double xi0_lower = 1e-6;
    double CM = 0.0;  // <= 0: measured from the simulated w

    /// (0.05, 0.15, 0.45), a = 2, A = 2.5, eta1 = 3 cosh(l) a,
    /// eta2 = 8 cosh(l) A (1 + 1), w0 = 100 (delta_1 - delta_-1).
    static BarrierParams defaults(const Dispersion& d);
    nlohmann::json to_json() const;
};

struct ParamCheck {
    bool pass = true;
    std::string first_violation;
};

/// 0 < delta < beta < min(alpha - delta, (3 alpha - 1)/2) < alpha < 1/2,
/// beta < eta < alpha, 0 < eta1 < eta2, a > 1, odd w0, xi0 > 0.
ParamCheck validate_params(const BarrierParams& p);

/// (1 + t)^{-(3/2 - beta)} cos((j - c t) / (1 + t)^alpha), no window.
double cosine_term(double j, double t, const BarrierParams& p, const Dispersion& d);
/// Time derivative of cosine_term at fixed j.
double cosine_rate(double j, double t, const BarrierParams& p, const Dispersion& d);

struct CutoffValue {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

/// Quintic smoothstep in s = (x - eta1) / (eta2 - eta1).
CutoffValue cutoff_Gamma(double x, double eta1, double eta2);

inline constexpr double kCutoffC1 = 1.875;
inline constexpr double kCutoffC2 = 5.773502691896258;  // 10 / sqrt(3)

struct CutoffBounds {
    double sup_d1 = 0.0;
    double sup_d2 = 0.0;
    double bound_d1 = 0.0;  // C1 / (eta2 - eta1)
    double bound_d2 = 0.0;  // C2 / (eta2 - eta1)^2
    bool within = true;
};

CutoffBounds cutoff_bounds(double eta1, double eta2, int n_samples = 1000);

double xi_upper(double t, const BarrierParams& p);
double xi_upper_rate(double t, const BarrierParams& p);
/// xi0 / (1 + xi0 CM t / (1 + t)), the exact solution of xi' = -CM xi^2 (1+t)^-2.
double xi_lower(double t, const BarrierParams& p, double CM);
double xi_lower_rate(double t, const BarrierParams& p, double CM);

/// f'(0) s - e^{l x} f(e^{-l x} s), x = j - c t.
double nonlinear_R(double j, double t, double s, const ReactionSpec& f, const Dispersion& d);

/// sup over s in (0, 1] of (f'(0) s - f(s)) / s^2, sampled.
double reaction_M(const ReactionSpec& f, int n_samples = 1000);

/// Both barriers at one time, built on a snapshot of w.
class BarrierFrame {
public:
    BarrierFrame(const BarrierParams& p, const Dispersion& d, const LatticeField& w, double CM);

    double t() const noexcept { return t_; }
    double chi() const noexcept { return chi_; }
    double x_of(long j) const noexcept { return static_cast<double>(j) - d_.c_star * t_; }

    double upper(long j) const;
    /// d/dt upper - (L upper)_j
    double residual_upper(long j) const;
    double lower(long j) const;
    /// d/dt lower - (L lower)_j, without the nonlinear term.
    double residual_lower(long j) const;
    double w_tilde(long j) const;

private:
    double w(long j) const { return w_.at(j); }
    double Lw(long j) const;
    bool in_upper_window(long j) const;
    bool in_lower_window(long j) const;
    bool in_chi(long j) const;
    double cutoff_part(long j) const;
    double cutoff_rate(long j) const;

    BarrierParams p_;
    Dispersion d_;
    const LatticeField& w_;
    double t_;
    double CM_;
    double el_, eml_;
    double chi_;
    double w0_norm_;
};

struct RegionReport {
    std::string barrier;  // "upper" or "lower"
    std::string region;
    double lo = 0.0, hi = 0.0;  // in x = j - c t
    std::size_t n_points = 0;
    double min_residual = 0.0;
    double max_residual = 0.0;
    long worst_j = 0;
    bool pass = false;
};

inline constexpr std::size_t kRegionGridPoints = 400;

/// Upper regions R1..R5: residual_upper >= 0 required.
std::vector<RegionReport> certify_upper(const BarrierFrame& f, const Dispersion& d, const BarrierParams& p);
/// Lower regions R1..R4: residual_lower + R(lower) <= 0 required.
std::vector<RegionReport> certify_lower(const BarrierFrame& f, const Dispersion& d, const BarrierParams& p,
                                        const ReactionSpec& reaction);

struct BarrierTimeReport {
    double t = 0.0;
    double chi = 0.0;
    double xi_upper = 0.0;
    double xi_lower = 0.0;
    double scale = 0.0;  // (1 + t)^{-(3/2 - beta + 2 alpha)}, size of the leading residual terms
    double upper_min_value = 0.0;
    std::vector<RegionReport> regions;
};

struct BarrierCheckReport {
    double C = 0.0;
    double M = 0.0;
    double CM = 0.0;
    bool CM_measured = false;
    std::vector<BarrierTimeReport> times;
    bool all_pass = true;
    nlohmann::json to_json() const;
};

/// Integrates w from p.w0 with step dt, measures C from
/// e^{-l t^delta} w_j (1 + t)^2 over j - c t >= t^delta and t >= cm_t_min
/// (unless p.CM > 0), and certifies both barriers at every requested time.
BarrierCheckReport barrier_check(const Dispersion& d, const ReactionSpec& reaction, const BarrierParams& p,
                                 std::span<const double> times, double dt = 0.05, double cm_t_min = 100.0);

}  // namespace latkpp
