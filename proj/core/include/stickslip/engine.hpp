#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "stickslip/model.hpp"
#include "stickslip/slip.hpp"

namespace stickslip {

enum class PhaseKind { Stick, Slip };

enum class Termination {
    ConvergedToLambda,
    MaxTime,
    MaxCycles,
    NeverExitStick,
    ChatterDetected,
};

/// One trajectory sample. During slip, u is the relay value; during stick it
/// is the equivalent control (0 when fc = 0). dissipated is the cumulative
/// Coulomb dissipation up to t.
struct Sample {
    double t{0.0};
    State state;
    double u{0.0};
    double v{0.0};
    double dissipated{0.0};
    bool on_grid{false};
};

/// A maximal stick or slip phase. Slip phases span relay flips; the flips are
/// recorded as events, not segment boundaries. Adjacent segments share their
/// boundary state exactly.
struct PhaseSegment {
    PhaseKind kind{PhaseKind::Slip};
    double t_start{0.0};
    double t_end{0.0};
    State state_start;
    State state_end;
    std::optional<int> relay_u;  ///< u at segment start; nullopt for stick
    bool open_ended{false};      ///< terminal stick that never exits
    std::vector<Sample> samples;
};

enum class TraceEventKind { EnterStiction, StickExit, RelayFlip };

struct TraceEvent {
    TraceEventKind kind;
    double t{0.0};
    State state;
};

struct EnergyReport {
    std::vector<double> v_at_stick_onsets;
    std::vector<double> v_at_stick_exits;
    /// (a, b) of the energy ellipse at each stick exit:
    /// a = sqrt(2V/kp), b = sqrt(2V/ki).
    std::vector<std::array<double, 2>> ellipse_axes;
    double dissipated{0.0};  ///< total \int fc |x3| dt over the run
};

struct SimulationLimits {
    double t_max{100.0};
    long max_cycles{1000000};
    double eps_lambda{0.0};        ///< 0 -> default 1e-12 * max(1, fc/kp)
    double divergence_bound{0.0};  ///< 0 -> default 1e9 * max(1, |x0|_inf)
    int chatter_max_flips{64};
    double chatter_window{1e-9};
};

struct Trace {
    std::vector<PhaseSegment> segments;
    std::vector<TraceEvent> events;
    long cycle_count{0};  ///< number of stick -> slip transitions
    Termination termination{Termination::MaxTime};
    EnergyReport energy;

    // run metadata
    Gains gains;
    double fc{0.0};
    State initial;
    double output_rate{0.0};
    double t_end{0.0};

    const State& final_state() const { return segments.back().state_end; }
};

/// Raised when the state norm exceeds the configured divergence bound.
class DivergenceDetected : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Event-driven simulation alternating closed-form slip propagation with the
/// sliding-mode stick dynamics. Cost scales with the number of stick/slip
/// events, not with t_max.
Trace simulate(const State& initial, const Gains& gains, const FrictionParams& friction,
               const SimulationLimits& limits, double output_rate);

/// Potential energy of the control errors: V = ki x1^2 / 2 + kp x2^2 / 2.
double stiction_energy(const State& state, const Gains& gains);

/// Coulomb dissipation over one quadrature interval: fc |x3| dt.
double dissipation_increment(double x3, double fc, double dt);

const char* to_string(Termination t);

}  // namespace stickslip
