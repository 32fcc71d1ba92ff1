#pragma once

#include <vector>

#include "stickslip/model.hpp"

namespace stickslip {

/// Fixed-step switch-model integrator configuration. v_eps = 0 selects the
/// default band 10 * dt * fc.
struct OracleConfig {
    double dt{1e-5};
    double v_eps{0.0};
};

/// Advances the switch-model dynamics by one nominal step of cfg.dt.
///
/// Inside the velocity band with the force balance |ki x1 + kp x2| <= fc the
/// state sticks: x3 is held at 0 and x1 drifts by x2 dt. Otherwise an
/// explicit RK4 step is taken with the friction force frozen over the step;
/// a sign change of x3 within the step is localized by bisection and the
/// step continues from the crossing (sticking there when the force balance
/// holds, flipping the friction force when it does not).
State oracle_step(const State& state, const SystemMatrices& system,
                  const OracleConfig& cfg);

struct OracleSample {
    double t{0.0};
    State state;
};

struct OracleRun {
    std::vector<OracleSample> samples;
    // run metadata
    double kd{0.0}, kp{0.0}, ki{0.0}, fc{0.0};
    State initial;
    double dt{0.0};

    const State& final_state() const { return samples.back().state; }
};

/// Repeated oracle_step with sampling every sample_stride steps (the final
/// step is always sampled). Deterministic for fixed inputs.
OracleRun oracle_run(const State& initial, const SystemMatrices& system,
                     const OracleConfig& cfg, double t_end, long sample_stride = 1);

}  // namespace stickslip
