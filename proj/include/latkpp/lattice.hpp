#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "latkpp/dispersion.hpp"
#include "latkpp/reaction.hpp"

namespace latkpp {

/// Finite window [j_min, j_min + size - 1] of a lattice sequence. Indices
/// left of the window read as left_clamp, right of it as right_clamp.
struct LatticeField {
    double t = 0.0;
    long j_min = 0;
    std::vector<double> values;
    double left_clamp = 0.0;
    double right_clamp = 0.0;

    std::size_t size() const noexcept { return values.size(); }
    long j_max() const noexcept { return j_min + static_cast<long>(values.size()) - 1; }
    bool contains(long j) const noexcept { return j >= j_min && j <= j_max(); }
    double at(long j) const noexcept {
        if (j < j_min) return left_clamp;
        if (j > j_max()) return right_clamp;
        return values[static_cast<std::size_t>(j - j_min)];
    }
    double& operator[](long j) { return values[static_cast<std::size_t>(j - j_min)]; }
    double sum() const;
    /// max(|first entry|, |last entry|): how much mass has reached the edges.
    double boundary_magnitude() const;

    static LatticeField filled(long j_min, long j_max, double value, double left = 0.0, double right = 0.0);
    /// Kronecker delta at j0 with zero clamps.
    static LatticeField delta(long j_min, long j_max, long j0 = 0);
    /// 1 for j <= 0, 0 for j >= 1, clamps (1, 0).
    static LatticeField step(long j_min, long j_max);
};

struct NonlinearKpp {
    ReactionSpec reaction;
};
struct LinearizedKpp {
    double fprime0;
};
/// Comoving linearization: e^l w_{j-1} - 2 cosh(l) w_j + e^-l w_{j+1}.
struct MovingFrame {
    Dispersion dispersion;
};
using RhsKind = std::variant<NonlinearKpp, LinearizedKpp, MovingFrame>;

/// Writes d/dt of every stored entry into `out` (size must match).
void rhs(const LatticeField& field, const RhsKind& kind, std::span<double> out);
std::vector<double> rhs(const LatticeField& field, const RhsKind& kind);

/// One classical RK4 step; clamps are held fixed. Subnormal results are flushed to zero.
LatticeField rk4_step(const LatticeField& field, const RhsKind& kind, double dt);

/// Called after every `stride` steps with the step count and the current field.
struct Observer {
    std::size_t stride = 1;
    std::function<void(std::size_t, const LatticeField&)> callback;
};

/// Applies n_steps RK4 steps. Time is set to t0 + k dt after step k.
/// Throws BlowupError as soon as a non-finite entry appears.
LatticeField integrate(LatticeField field, const RhsKind& kind, double dt, std::size_t n_steps,
                       std::span<const Observer> observers = {});

/// Reusable RK4 workspace for callers that drive the loop themselves.
class Rk4Stepper {
public:
    explicit Rk4Stepper(RhsKind kind);
    /// Advances in place; t += dt.
    void step(LatticeField& field, double dt);
    const RhsKind& kind() const noexcept { return kind_; }

private:
    RhsKind kind_;
    std::vector<double> k1_, k2_, k3_, k4_;
    LatticeField stage_;
};

/// Header `t,j,value`, one row per stored index.
void write_csv(std::ostream& os, const LatticeField& field);

}  // namespace latkpp
