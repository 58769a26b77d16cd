#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "latkpp/reaction.hpp"

namespace latkpp {

/// Adaptive Simpson on [a, b] to relative accuracy rel_tol.
/// Throws QuadratureError when the recursion depth is exhausted.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-10);

/// Restriction to [0, inf) of odd initial data with support in [0, Z].
struct OddData {
    std::function<double(double)> p0;
    double support = 0.0;
    double moment1 = 0.0;  // int_0^Z z p0(z) dz

    /// Indicator of [0, Z]; moment1 = Z^2 / 2 in closed form.
    static OddData indicator(double Z);
    /// Moment computed by quadrature. p0 must be nonnegative on [0, Z].
    static OddData from_function(std::function<double(double)> p0, double Z);
};

/// Solution of the heat equation p_t = p_yy from the odd extension of the data.
double heat_odd_solution(double t, double y, const OddData& data);

/// p(t, y) t^{3/2} / (y e^{-y^2/4t}); requires 0 < |y| <= sqrt(t).
double asymptotic_ratio(double t, double y, const OddData& data);

/// moment1 / (2 sqrt(pi)), the large-time limit of asymptotic_ratio.
double asymptotic_constant(const OddData& data);

struct ContinuumOptions {
    double half_width = 60.0;  // moving window [front - W, front + W]
    double t_fit_min = 50.0;
    double t_fit_max = -1.0;  // negative: use T
    double sample_every = 1.0;
    double smoothing_time = 0.1;  // initial step is pre-smoothed by this much heat flow
};

struct ContinuumBramsonResult {
    double m = 0.5;
    double c_star = 0.0;
    double a_hat = 0.0;
    double b_hat = 0.0;
    double r2 = 0.0;
    double slope_stderr = 0.0;
    double theory = 0.0;  // 3 / c*
    double min_value = 0.0;
    double max_value = 0.0;
    bool monotone = true;
    double monotone_violation = 0.0;  // largest u(x + dx) - u(x) seen, 0 when monotone
    std::vector<std::pair<double, double>> trace;  // (t, x_m)
};

/// Method of lines for u_t = u_xx + f(u) from step data, fourth-order
/// central differences in x, RK4 in t. The lab-frame window is shifted by
/// whole cells to follow the front; X bounds how far it may travel.
ContinuumBramsonResult continuous_bramson(const ReactionSpec& reaction, double dx, double X, double dt, double T,
                                          double m = 0.5, const ContinuumOptions& opt = {});
ContinuumBramsonResult continuous_bramson(double fprime0, double dx, double X, double dt, double T, double m = 0.5,
                                          const ContinuumOptions& opt = {});

}  // namespace latkpp
