#include "stickslip/engine.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "stickslip/stiction.hpp"

namespace stickslip {
namespace {

constexpr double kGridSnap = 1e-9;

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

struct Runner {
    const Gains gains;
    const FrictionParams friction;
    const SimulationLimits limits;
    const double rate;
    const SystemMatrices sys;
    const double eps_lambda;
    const double div_bound;
    const double period;

    Trace tr;
    double dissipated = 0.0;
    double t = 0.0;
    State x;

    Runner(const State& initial, const Gains& g, const FrictionParams& f,
           const SimulationLimits& lim, double output_rate)
        : gains(g),
          friction(f),
          limits(lim),
          rate(output_rate),
          sys(build_system(g, f)),
          eps_lambda(lim.eps_lambda > 0.0 ? lim.eps_lambda
                                          : 1e-12 * std::max(1.0, f.fc / g.kp)),
          div_bound(lim.divergence_bound > 0.0
                        ? lim.divergence_bound
                        : 1e9 * std::max(1.0, initial.vec().lpNorm<Eigen::Infinity>())),
          period(1.0 / output_rate),
          x(initial) {
        tr.gains = g;
        tr.fc = f.fc;
        tr.initial = initial;
        tr.output_rate = output_rate;
    }

    bool on_grid(double time) const {
        const double k = std::round(time / period);
        return std::abs(k * period - time) <= kGridSnap * std::max(1.0, std::abs(time));
    }

    // grid ticks strictly inside (t_lo, t_hi)
    std::vector<double> grid_times(double t_lo, double t_hi) const {
        std::vector<double> out;
        for (long k = static_cast<long>(std::floor(t_lo / period)) + 1;; ++k) {
            const double tk = k * period;
            if (tk <= t_lo) continue;
            if (tk >= t_hi) break;
            out.push_back(tk);
        }
        return out;
    }

    void check_divergence(const State& s, double time) const {
        if (s.vec().lpNorm<Eigen::Infinity>() > div_bound) {
            throw DivergenceDetected("state norm exceeded " + std::to_string(div_bound) +
                                     " at t = " + std::to_string(time));
        }
    }

    double stick_u(const State& s) const {
        return friction.fc > 0.0 ? equivalent_control(s, sys) : 0.0;
    }

    void push_sample(PhaseSegment& seg, double time, const State& s, double u_col) {
        seg.samples.push_back(Sample{time, s, u_col, stiction_energy(s, gains),
                                     dissipated, on_grid(time)});
    }

    // Stick phase: x2, x3 frozen; x1 affine with slope x2.
    PhaseSegment stick_segment(double t0, double t1, const State& entry, bool open) {
        PhaseSegment seg;
        seg.kind = PhaseKind::Stick;
        seg.t_start = t0;
        seg.t_end = t1;
        seg.state_start = entry;
        seg.open_ended = open;
        auto at = [&](double tau) {
            return State{entry.x1 + entry.x2 * (tau - t0), entry.x2, 0.0};
        };
        push_sample(seg, t0, entry, stick_u(entry));
        for (double tk : grid_times(t0, t1)) {
            const State sk = at(tk);
            push_sample(seg, tk, sk, stick_u(sk));
        }
        const State end_state = at(t1);
        push_sample(seg, t1, end_state, stick_u(end_state));
        seg.state_end = end_state;
        return seg;
    }

    // Samples one constant-u slip piece (t0, t1]; seg already contains the
    // sample at t0. Returns the truncation point when the state norm drops
    // below eps_lambda (convergence to the invariant set).
    std::optional<std::pair<double, State>> sample_piece(PhaseSegment& seg, double t0,
                                                         const State& x0, int u,
                                                         double t1, const State& x1) {
        State prev = x0;
        for (double tk : grid_times(t0, t1)) {
            const State sk = propagate(x0, SlipInput{u}, tk - t0, sys);
            dissipated += friction.fc * std::abs(sk.x2 - prev.x2);
            push_sample(seg, tk, sk, u);
            check_divergence(sk, tk);
            if (sk.vec().lpNorm<Eigen::Infinity>() <= eps_lambda) return {{tk, sk}};
            prev = sk;
        }
        dissipated += friction.fc * std::abs(x1.x2 - prev.x2);
        push_sample(seg, t1, x1, u);
        check_divergence(x1, t1);
        if (x1.vec().lpNorm<Eigen::Infinity>() <= eps_lambda) return {{t1, x1}};
        return std::nullopt;
    }

    void record_stick_entry() {
        tr.energy.v_at_stick_onsets.push_back(stiction_energy(x, gains));
    }

    // Runs one stick phase. Returns the relay value for the following slip,
    // or nullopt when the simulation ended.
    std::optional<int> run_stick() {
        record_stick_entry();
        if (std::abs(x.x2) <= eps_lambda) {
            tr.segments.push_back(stick_segment(t, limits.t_max, x, true));
            tr.termination = Termination::ConvergedToLambda;
            tr.t_end = limits.t_max;
            return std::nullopt;
        }
        const auto exit = stick_exit(x, t, sys);
        if (!exit.has_value()) {
            tr.segments.push_back(stick_segment(t, limits.t_max, x, true));
            tr.termination = Termination::NeverExitStick;
            tr.t_end = limits.t_max;
            return std::nullopt;
        }
        if (exit->exit_time <= t) {
            // entry on the outgoing edge: breakaway without a stick phase
            tr.energy.v_at_stick_onsets.pop_back();
            return x.x2 > 0.0 ? +1 : -1;
        }
        if (exit->exit_time >= limits.t_max) {
            tr.segments.push_back(stick_segment(t, limits.t_max, x, false));
            tr.termination = Termination::MaxTime;
            tr.t_end = limits.t_max;
            return std::nullopt;
        }

        tr.segments.push_back(stick_segment(t, exit->exit_time, x, false));
        const double v_exit = stiction_energy(exit->exit_state, gains);
        tr.energy.v_at_stick_exits.push_back(v_exit);
        tr.energy.ellipse_axes.push_back(
            {std::sqrt(2.0 * v_exit / gains.kp), std::sqrt(2.0 * v_exit / gains.ki)});
        tr.events.push_back({TraceEventKind::StickExit, exit->exit_time, exit->exit_state});

        t = exit->exit_time;
        x = exit->exit_state;
        tr.cycle_count += 1;
        if (tr.cycle_count >= limits.max_cycles) {
            tr.termination = Termination::MaxCycles;
            tr.t_end = t;
            return std::nullopt;
        }
        return x.x2 > 0.0 ? +1 : -1;
    }

    // Runs one slip phase (possibly spanning relay flips). Returns true when
    // the phase ended in stiction and the stick handler should run next.
    bool run_slip(int u) {
        PhaseSegment seg;
        seg.kind = PhaseKind::Slip;
        seg.t_start = t;
        seg.state_start = x;
        seg.relay_u = u;
        push_sample(seg, t, x, u);

        int fast_flips = 0;
        double last_flip = -std::numeric_limits<double>::infinity();

        while (true) {
            const double horizon = limits.t_max - t;
            if (horizon <= 0.0) {
                seg.t_end = t;
                seg.state_end = x;
                tr.segments.push_back(seg);
                tr.termination = Termination::MaxTime;
                tr.t_end = t;
                return false;
            }
            const auto ev = next_event(x, SlipInput{u}, sys, horizon);
            const double piece_end_t = ev ? t + ev->event_time : limits.t_max;
            const State piece_end_x =
                ev ? ev->event_state : propagate(x, SlipInput{u}, horizon, sys);

            const auto converged = sample_piece(seg, t, x, u, piece_end_t, piece_end_x);
            if (converged.has_value()) {
                seg.t_end = converged->first;
                seg.state_end = converged->second;
                tr.segments.push_back(seg);
                tr.termination = Termination::ConvergedToLambda;
                tr.t_end = converged->first;
                return false;
            }

            t = piece_end_t;
            x = piece_end_x;

            if (!ev) {
                seg.t_end = t;
                seg.state_end = x;
                tr.segments.push_back(seg);
                tr.termination = Termination::MaxTime;
                tr.t_end = t;
                return false;
            }

            if (ev->kind == SlipEventKind::EnterStiction) {
                const auto prospective = stick_exit(x, t, sys);
                if (prospective.has_value() && prospective->exit_time <= t) {
                    // grazing the outgoing edge: no dwell, keep slipping
                    const int u_new = x.x2 > 0.0 ? +1 : -1;
                    if (u_new != u) {
                        tr.events.push_back({TraceEventKind::RelayFlip, t, x});
                        u = u_new;
                    }
                    continue;
                }
                seg.t_end = t;
                seg.state_end = x;
                tr.segments.push_back(seg);
                tr.events.push_back({TraceEventKind::EnterStiction, t, x});
                return true;
            }

            // relay flip inside the slip phase
            tr.events.push_back({TraceEventKind::RelayFlip, t, x});
            if (t - last_flip < limits.chatter_window) {
                if (++fast_flips > limits.chatter_max_flips) {
                    seg.t_end = t;
                    seg.state_end = x;
                    tr.segments.push_back(seg);
                    tr.termination = Termination::ChatterDetected;
                    tr.t_end = t;
                    return false;
                }
            } else {
                fast_flips = 0;
            }
            last_flip = t;
            u = -u;
        }
    }

    Trace run() {
        check_divergence(x, 0.0);
        bool stick_next;
        int u = 0;
        if (in_stiction(x, sys, default_velocity_tol(x))) {
            x.x3 = 0.0;
            stick_next = true;
        } else {
            stick_next = false;
            const double vtol = default_velocity_tol(x);
            if (std::abs(x.x3) > vtol) {
                u = x.x3 > 0.0 ? -1 : +1;
            } else {
                const double drive = gains.ki * x.x1 + gains.kp * x.x2;
                u = sign_of(drive) >= 0 ? +1 : -1;
            }
        }

        while (true) {
            if (stick_next) {
                const auto next_u = run_stick();
                if (!next_u.has_value()) break;
                u = *next_u;
                stick_next = false;
            } else {
                if (!run_slip(u)) break;
                stick_next = true;
            }
        }

        tr.energy.dissipated = dissipated;
        return tr;
    }
};

}  // namespace

Trace simulate(const State& initial, const Gains& gains, const FrictionParams& friction,
               const SimulationLimits& limits, double output_rate) {
    if (!initial.vec().allFinite()) throw std::invalid_argument("initial state must be finite");
    if (!(limits.t_max > 0.0) || !std::isfinite(limits.t_max)) {
        throw std::invalid_argument("t_max must be finite and > 0");
    }
    if (limits.max_cycles <= 0) throw std::invalid_argument("max_cycles must be > 0");
    if (!(output_rate > 0.0) || !std::isfinite(output_rate)) {
        throw std::invalid_argument("output_rate must be finite and > 0");
    }
    build_system(gains, friction);  // validates the parameters

    Runner runner(initial, gains, friction, limits, output_rate);
    return runner.run();
}

double stiction_energy(const State& state, const Gains& gains) {
    return 0.5 * gains.ki * state.x1 * state.x1 + 0.5 * gains.kp * state.x2 * state.x2;
}

double dissipation_increment(double x3, double fc, double dt) {
    if (dt < 0.0) throw std::invalid_argument("dt must be >= 0");
    return fc * std::abs(x3) * dt;
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::ConvergedToLambda: return "converged_to_lambda";
        case Termination::MaxTime: return "max_time";
        case Termination::MaxCycles: return "max_cycles";
        case Termination::NeverExitStick: return "never_exit_stick";
        case Termination::ChatterDetected: return "chatter_detected";
    }
    return "unknown";
}

}  // namespace stickslip
