#pragma once

#include <array>
#include <optional>
#include <variant>

#include "stickslip/model.hpp"

namespace stickslip {

/// Relative slack admitted on the stiction boundary when validating entries
/// produced by event localization; the theorem-style predicate itself is
/// exact-inclusive.
inline constexpr double kStictionBoundarySlack = 4e-12;

/// Default tolerance for treating x3 as zero: 1e-10 * max(1, |state|_inf).
double default_velocity_tol(const State& state);

/// |ki x1| + |kp x2|, the load the friction level has to hold.
double stiction_load(const State& state, const SystemMatrices& system);

/// Stiction predicate: |x3| <= tol_v and |ki x1| + |kp x2| <= fc
/// (inclusive boundary).
bool in_stiction(const State& state, const SystemMatrices& system, double tol_v);
bool in_stiction(const State& state, const SystemMatrices& system);

/// Sliding-mode dynamics during stiction: (x1', x2', x3') = (x2, 0, 0).
State stick_derivative(const State& state);

enum class BoundaryEdge { FirstQuadrant, ThirdQuadrant };

/// Closed-form stick exit: the integral error drifts at rate x2 until the
/// state reaches the stiction boundary.
struct StickExit {
    State exit_state;   ///< x2 and x3 copied from the entry; x3 == 0
    double exit_time;
    BoundaryEdge quadrant;
};

/// Returns the boundary point and time where the stick phase ends, or
/// nullopt when the state never leaves stiction (x2 == 0 or ki == 0).
/// Throws std::invalid_argument for entries outside the stiction region.
std::optional<StickExit> stick_exit(const State& entry, double entry_time,
                                    const SystemMatrices& system);

/// Equivalent control that maintains the sliding mode without switching:
/// (ki x1 + kp x2 + kd x3) / fc. On stick states its magnitude is <= 1.
/// Throws std::invalid_argument when fc == 0.
double equivalent_control(const State& state, const SystemMatrices& system);

/// Stiction region geometry in the (x1, x2) projection.
struct StictionRegion {
    double fc{0.0};
    double kp{0.0};
    double ki{0.0};
    double d1{0.0};  ///< half-diagonal along x1: fc/ki, +inf when ki == 0
    double d2{0.0};  ///< half-diagonal along x2: fc/kp

    bool contains(const State& state, double tol_v) const;
};
StictionRegion stiction_region(const SystemMatrices& system);

/// Rhombus corners (+-fc/ki, 0), (0, +-fc/kp) for ki > 0.
struct RhombusVertices {
    std::array<std::array<double, 2>, 4> points;
};
/// Degenerate region for ki == 0: the strip |x2| <= half_width, x1 free.
struct StripRegion {
    double half_width{0.0};
};

std::variant<RhombusVertices, StripRegion> region_vertices(const SystemMatrices& system);

}  // namespace stickslip
