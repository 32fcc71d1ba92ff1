#include "stickslip/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace stickslip {
namespace {

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

// RK4 step of the linear dynamics with a frozen friction force.
State rk4_step(const State& x, double h, const SystemMatrices& sys, double friction_force) {
    const double ki = sys.ki(), kp = sys.kp(), kd = sys.kd();
    auto f = [&](double x1, double x2, double x3) {
        return Eigen::Vector3d{x2, x3, -(ki * x1 + kp * x2 + kd * x3) - friction_force};
    };
    const Eigen::Vector3d y = x.vec();
    const Eigen::Vector3d k1 = f(y[0], y[1], y[2]);
    const Eigen::Vector3d y2 = y + 0.5 * h * k1;
    const Eigen::Vector3d k2 = f(y2[0], y2[1], y2[2]);
    const Eigen::Vector3d y3 = y + 0.5 * h * k2;
    const Eigen::Vector3d k3 = f(y3[0], y3[1], y3[2]);
    const Eigen::Vector3d y4 = y + h * k3;
    const Eigen::Vector3d k4 = f(y4[0], y4[1], y4[2]);
    return State::from(y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

void validate(const OracleConfig& cfg) {
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) {
        throw std::invalid_argument("oracle dt must be finite and > 0");
    }
    if (cfg.v_eps < 0.0 || !std::isfinite(cfg.v_eps)) {
        throw std::invalid_argument("oracle v_eps must be finite and >= 0");
    }
}

}  // namespace

State oracle_step(const State& state, const SystemMatrices& sys, const OracleConfig& cfg) {
    validate(cfg);
    const double v_eps = cfg.v_eps > 0.0 ? cfg.v_eps : 10.0 * cfg.dt * sys.fc;
    const double ki = sys.ki(), kp = sys.kp(), kd = sys.kd();

    const double balance = ki * state.x1 + kp * state.x2;
    if (std::abs(state.x3) < v_eps && std::abs(balance) <= sys.fc) {
        return {state.x1 + state.x2 * cfg.dt, state.x2, 0.0};
    }

    State cur = state;
    double remaining = cfg.dt;
    for (int depth = 0; depth < 8 && remaining > 0.0; ++depth) {
        const double drive = -(ki * cur.x1 + kp * cur.x2 + kd * cur.x3);
        const int s = std::abs(cur.x3) >= v_eps ? sign_of(cur.x3) : sign_of(drive);
        const double friction_force = sys.fc * s;

        const State next = rk4_step(cur, remaining, sys, friction_force);
        if (cur.x3 == 0.0 || next.x3 == 0.0 || sign_of(next.x3) == sign_of(cur.x3)) {
            return next;
        }

        // x3 crossed zero inside the step: localize the crossing
        double lo = 0.0, hi = remaining;
        State crossing = next;
        for (int it = 0; it < 64 && (hi - lo) > 1e-15 * remaining; ++it) {
            const double mid = 0.5 * (lo + hi);
            const State xm = rk4_step(cur, mid, sys, friction_force);
            if (xm.x3 != 0.0 && sign_of(xm.x3) == sign_of(cur.x3)) {
                lo = mid;
            } else {
                hi = mid;
                crossing = xm;
            }
        }
        crossing.x3 = 0.0;

        const double balance_c = ki * crossing.x1 + kp * crossing.x2;
        if (std::abs(balance_c) <= sys.fc) {
            // sticks for the remainder of the step
            const double left = remaining - hi;
            return {crossing.x1 + crossing.x2 * left, crossing.x2, 0.0};
        }
        cur = crossing;
        remaining -= hi;
    }
    return cur;
}

OracleRun oracle_run(const State& initial, const SystemMatrices& sys,
                     const OracleConfig& cfg, double t_end, long sample_stride) {
    validate(cfg);
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
        throw std::invalid_argument("t_end must be finite and >= 0");
    }
    if (sample_stride < 1) throw std::invalid_argument("sample_stride must be >= 1");

    const long n_steps = std::llround(t_end / cfg.dt);
    OracleRun run;
    run.kd = sys.kd();
    run.kp = sys.kp();
    run.ki = sys.ki();
    run.fc = sys.fc;
    run.initial = initial;
    run.dt = cfg.dt;
    run.samples.reserve(static_cast<std::size_t>(n_steps / sample_stride) + 2);

    State x = initial;
    run.samples.push_back({0.0, x});
    for (long i = 1; i <= n_steps; ++i) {
        x = oracle_step(x, sys, cfg);
        if (i % sample_stride == 0 || i == n_steps) {
            run.samples.push_back({static_cast<double>(i) * cfg.dt, x});
        }
    }
    return run;
}

}  // namespace stickslip
