#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>

#include "latkpp/dispersion.hpp"
#include "latkpp/reaction.hpp"

namespace latkpp {

/// Randomized checks of the maximum and comparison principles for the
/// comoving operator on domains with moving boundaries.

using Boundary = std::function<double(double)>;

struct PrincipleConfig {
    long j_min = 0;
    long j_max = 40;
    double T = 5.0;
    double dt = 0.005;
    double tolerance = 1e-10;
};

enum class Corruption {
    None,
    PositiveBoundary,  // holds the strip left of the domain at +1
};

struct PrincipleReport {
    std::uint64_t seed = 0;
    bool skipped = false;
    std::string reason;
    std::size_t checks = 0;
    std::size_t violations = 0;
    double worst = -INFINITY;  // largest z (or lower - upper) seen inside the domain
    bool pass() const noexcept { return !skipped && violations == 0; }
};

/// z' = L z + s with random s <= 0 on j >= zeta(t), z(0) <= 0, and the strip
/// left of zeta drifting downward from nonpositive values. Asserts z <= tol
/// on the domain at every step. With `zero` all random amplitudes vanish.
PrincipleReport max_principle_test(std::uint64_t seed, const Boundary& zeta, const Dispersion& d,
                                   const PrincipleConfig& cfg = {}, Corruption corruption = Corruption::None,
                                   bool zero = false);

/// Same with the domain zeta(t) <= j <= xi(t).
PrincipleReport max_principle_test2(std::uint64_t seed, const Boundary& zeta, const Boundary& xi, const Dispersion& d,
                                    const PrincipleConfig& cfg = {}, Corruption corruption = Corruption::None,
                                    bool zero = false);

/// Random boundary zeta(t) = z0 + v t + A sin(w t) with v >= 0, A <= 1/2,
/// so that zeta(t) >= zeta(0) - 1 holds.
Boundary random_boundary(std::uint64_t seed, double lo, double hi);

/// zeta as above and xi(t) = zeta(t) + W + B sin(w' t + phi) with W > B.
std::pair<Boundary, Boundary> random_boundary_pair(std::uint64_t seed, double lo, double hi);

/// Ordered super/sub pair for v' = L v - R(t; v): the upper one gets extra
/// nonnegative forcing, the lower one nonpositive, initial data and strip
/// values are ordered. Boundaries are drawn from the seed. With `identical`
/// both members coincide.
PrincipleReport comparison_test(std::uint64_t seed, bool two_boundaries, const Dispersion& d,
                                const ReactionSpec& reaction, const PrincipleConfig& cfg = {},
                                bool identical = false);

}  // namespace latkpp
