#include "stickslip/stiction.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace stickslip {

double default_velocity_tol(const State& state) {
    return 1e-10 * std::max(1.0, state.vec().lpNorm<Eigen::Infinity>());
}

double stiction_load(const State& state, const SystemMatrices& system) {
    return std::abs(system.ki() * state.x1) + std::abs(system.kp() * state.x2);
}

bool in_stiction(const State& state, const SystemMatrices& system, double tol_v) {
    if (!(tol_v > 0.0)) throw std::invalid_argument("tol_v must be > 0");
    return std::abs(state.x3) <= tol_v && stiction_load(state, system) <= system.fc;
}

bool in_stiction(const State& state, const SystemMatrices& system) {
    return in_stiction(state, system, default_velocity_tol(state));
}

State stick_derivative(const State& state) {
    return {state.x2, 0.0, 0.0};
}

std::optional<StickExit> stick_exit(const State& entry, double entry_time,
                                    const SystemMatrices& system) {
    if (!std::isfinite(entry_time)) throw std::invalid_argument("entry_time must be finite");
    const double load = stiction_load(entry, system);
    const double slack = kStictionBoundarySlack * std::max(system.fc, load);
    if (std::abs(entry.x3) > default_velocity_tol(entry) || load > system.fc + slack) {
        throw std::invalid_argument("stick_exit: entry state is not in stiction");
    }
    if (system.ki() == 0.0 || entry.x2 == 0.0) return std::nullopt;

    const double exit_x1 =
        entry.x2 * (system.fc / std::abs(entry.x2) - system.kp()) / system.ki();
    double dwell = (exit_x1 - entry.x1) / entry.x2;
    if (dwell < 0.0) dwell = 0.0;  // entry sits on the outgoing edge

    StickExit exit;
    exit.exit_state = State{exit_x1, entry.x2, 0.0};
    exit.exit_time = entry_time + dwell;
    exit.quadrant = entry.x2 > 0.0 ? BoundaryEdge::FirstQuadrant : BoundaryEdge::ThirdQuadrant;
    return exit;
}

double equivalent_control(const State& state, const SystemMatrices& system) {
    if (system.fc == 0.0) {
        throw std::invalid_argument("equivalent control is undefined for fc = 0");
    }
    return (system.ki() * state.x1 + system.kp() * state.x2 + system.kd() * state.x3) /
           system.fc;
}

bool StictionRegion::contains(const State& state, double tol_v) const {
    if (!(tol_v > 0.0)) throw std::invalid_argument("tol_v must be > 0");
    return std::abs(state.x3) <= tol_v &&
           std::abs(ki * state.x1) + std::abs(kp * state.x2) <= fc;
}

StictionRegion stiction_region(const SystemMatrices& system) {
    StictionRegion region;
    region.fc = system.fc;
    region.kp = system.kp();
    region.ki = system.ki();
    region.d1 = region.ki > 0.0 ? region.fc / region.ki
                                : std::numeric_limits<double>::infinity();
    region.d2 = region.fc / region.kp;
    return region;
}

std::variant<RhombusVertices, StripRegion> region_vertices(const SystemMatrices& system) {
    const double ki = system.ki();
    const double kp = system.kp();
    if (ki == 0.0) return StripRegion{system.fc / kp};

    const double d1 = system.fc / ki;
    const double d2 = system.fc / kp;
    RhombusVertices v;
    v.points = {{{d1, 0.0}, {0.0, d2}, {-d1, 0.0}, {0.0, -d2}}};
    return v;
}

}  // namespace stickslip
