#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "latkpp/dispersion.hpp"
#include "latkpp/fit.hpp"
#include "latkpp/lattice.hpp"
#include "latkpp/reaction.hpp"

namespace latkpp {

struct LevelCrossing {
    long j_m = 0;
    double x_m = 0.0;
    bool monotone = true;  // false: field was not nonincreasing, rightmost crossing used
};

/// j_m = sup{ j : u_j >= m }, x_m linear interpolation on [j_m, j_m + 1].
/// Throws NotFoundError when m is not bracketed by the window.
LevelCrossing level_set(const LatticeField& field, double m);

struct LevelSample {
    double t = 0.0;
    long j_m = 0;
    double x_m = 0.0;
};

struct LevelSetTrace {
    double m = 0.5;
    std::vector<LevelSample> samples;
};

/// Integrates the nonlinear lattice equation on [-L, L] from step data with
/// clamps (1, 0). Each observed field has its right edge checked against
/// kContaminationThreshold; a leak raises ContaminationError.
LatticeField simulate_step(const ReactionSpec& reaction, long L, double dt, double T,
                           std::span<const Observer> observers = {});

/// Step-data run that records level traces every `sample_stride` steps.
std::vector<LevelSetTrace> trace_levels(const ReactionSpec& reaction, long L, double dt, double T,
                                        std::span<const double> levels, std::size_t sample_stride);

struct BramsonFit {
    double m = 0.0;
    double a_hat = 0.0;
    double b_hat = 0.0;
    double r2 = 0.0;
    double slope_stderr = 0.0;
    std::size_t n = 0;
    double theory = 0.0;  // 3 / (2 lambda*)
};

/// Least squares of c* t - x_m(t) against ln t for samples in [t_min, t_max].
BramsonFit bramson_fit(const LevelSetTrace& trace, const Dispersion& d, double t_min, double t_max);

/// max - min over [t_lo, t_hi] of x_m(t) - c* t + (3 / (2 lambda*)) ln t.
double delay_oscillation(const LevelSetTrace& trace, const Dispersion& d, double t_lo, double t_hi);

struct SpreadingReport {
    double t = 0.0;
    double min_behind = 1.0;  // min over 0 <= j <= c_below t
    double max_ahead = 0.0;   // max over j > c_above t
};

SpreadingReport spreading_check(const LatticeField& field, const Dispersion& d, double c_below, double c_above);

struct FrontProfile {
    double t = 0.0;
    double anchor = 0.0;
    std::vector<long> offsets;
    std::vector<double> values;  // u(anchor + k), linear in j
};

FrontProfile extract_profile(const LatticeField& field, double m, long half_width);

/// sup over common offsets of |p1 - p2|.
double collapse_distance(const FrontProfile& p1, const FrontProfile& p2);

struct OddRatioPoint {
    long j = 0;
    double x = 0.0;  // j - c* t
    double w = 0.0;
    double ratio = 0.0;  // w t^{3/2} / x
};

struct OddAsymptoticsReport {
    double t = 0.0;
    double moment = 0.0;     // sum_{l >= 1} l w0_l
    double predicted = 0.0;  // moment / (cosh^{3/2} sqrt(4 pi))
    std::vector<OddRatioPoint> points;
    double min_ratio = 0.0;
    double max_ratio = 0.0;
    double max_rel_dev = 0.0;
    bool all_positive = true;
};

/// Throws DomainError unless w0 is odd, nonnegative on j >= 0 and nonzero.
void check_odd_data(const LatticeField& w0);

/// Integrates the comoving linearization from w0 and reports the ratio
/// over 1 <= j - c* t <= sqrt(t).
OddAsymptoticsReport odd_data_asymptotics(const LatticeField& w0, const Dispersion& d, double t_check,
                                          double dt = 0.01);

struct DecayReport {
    double A = 0.0;
    double eta_A = 0.0;
    std::size_t checked = 0;
    std::size_t violations = 0;
    double worst_ratio = 0.0;  // max of |w| / bound
};

/// eta_A = 4 cosh(l) A, the envelope |omega| <= 1.
double eta_envelope(double A, const Dispersion& d);

/// Checks |w_j(t)| <= |w0|_inf exp(-A (eta - eta_A)), eta = (j - J - c t)/sqrt(t + 1),
/// for all stored j with eta >= eta_A at each requested time.
DecayReport superdiffusive_decay_check(const LatticeField& w0, double A, const Dispersion& d,
                                       std::span<const double> times, double dt = 0.01);

}  // namespace latkpp
