#pragma once

#include <optional>
#include <stdexcept>

#include "stickslip/model.hpp"

namespace stickslip {

/// Relay value held constant over one slip piece; u = -sign(x3) while the
/// system moves, and flips only at x3 zero-crossings outside the stiction
/// region.
struct SlipInput {
    int u{+1};  ///< -1 or +1
};

/// e^{m t} via Pade scaling-and-squaring (Higham's method). Throws
/// std::invalid_argument for non-finite input.
Eigen::Matrix3d matrix_exponential(const Eigen::Matrix3d& m, double t);
Eigen::Matrix4d matrix_exponential(const Eigen::Matrix4d& m, double t);

/// Closed-form slip propagation
///   x(dt) = e^{A dt} x + \int_0^{dt} e^{A s} ds  B u,
/// computed through the exponential of the augmented matrix
/// [[A, B u], [0, 0]], which stays valid for singular A (ki = 0).
State propagate(const State& state, SlipInput input, double dt,
                const SystemMatrices& system);

enum class SlipEventKind { EnterStiction, RelayFlip };

/// x3 zero-crossing of the closed-form flow.
struct SlipEvent {
    double event_time{0.0};  ///< offset from the query state
    State event_state;       ///< x3 projected to exactly 0
    SlipEventKind kind;
};

struct EventTolerances {
    double x3_rel{1e-12};    ///< |x3| <= x3_rel * max(1, |state|_inf) at the root
    double time_rel{1e-13};  ///< bracket width <= time_rel * max(1, t*)
};

/// Earliest time t* in (0, horizon] with x3(t*) = 0 along the flow, refined
/// by bracketing plus bisection and a guarded Newton polish. The event kind
/// is EnterStiction when the landing point lies in the stiction region,
/// RelayFlip otherwise. Returns nullopt when x3 does not vanish within the
/// horizon. A state that is already resting inside the region (and would
/// dwell there) reports an immediate event at t = 0.
std::optional<SlipEvent> next_event(const State& state, SlipInput input,
                                    const SystemMatrices& system, double horizon,
                                    const EventTolerances& tol = {});

/// Raised when relay switching degenerates into chattering.
class ChatterDetected : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace stickslip
