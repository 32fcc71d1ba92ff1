#include "stickslip/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "stickslip/stiction.hpp"

namespace stickslip {
namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return out;
}

double parse_strict(const std::string& text) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size()) {
        throw std::runtime_error("malformed number '" + text + "' in CSV");
    }
    return v;
}

long grid_index(double t, double rate) {
    return std::lround(t * rate);
}

// Oracle samples rendered through the same trace.csv schema. The stick
// branch pins x3 to exactly 0, which doubles as the phase marker here.
void write_oracle_trace_csv(std::ostream& out, const OracleRun& run, const Gains& gains) {
    out << "t,x1,x2,x3,phase,u,V\n";
    for (const auto& s : run.samples) {
        const bool stick = s.state.x3 == 0.0 &&
                           std::abs(gains.ki * s.state.x1 + gains.kp * s.state.x2) <= run.fc;
        const double u = s.state.x3 > 0.0 ? -1.0 : (s.state.x3 < 0.0 ? 1.0 : 0.0);
        out << format_full(s.t) << ',' << format_full(s.state.x1) << ','
            << format_full(s.state.x2) << ',' << format_full(s.state.x3) << ','
            << (stick ? "stick" : "slip") << ',' << format_full(u) << ','
            << format_full(stiction_energy(s.state, gains)) << '\n';
    }
}

void write_oracle_events_csv(std::ostream& out, const OracleRun& run, const Gains& gains) {
    out << "n,kind,t,x1,x2,x3\n";
    long n = 0;
    auto emit = [&](const char* kind, const OracleSample& s) {
        out << n++ << ',' << kind << ',' << format_full(s.t) << ','
            << format_full(s.state.x1) << ',' << format_full(s.state.x2) << ','
            << format_full(s.state.x3) << '\n';
    };
    auto stick_at = [&](const OracleSample& s) {
        return s.state.x3 == 0.0 &&
               std::abs(gains.ki * s.state.x1 + gains.kp * s.state.x2) <= run.fc;
    };
    for (std::size_t i = 1; i < run.samples.size(); ++i) {
        const bool was = stick_at(run.samples[i - 1]);
        const bool now = stick_at(run.samples[i]);
        if (!was && now) emit("enter_stiction", run.samples[i]);
        else if (was && !now) emit("stick_exit", run.samples[i]);
        else if (!was && !now && run.samples[i - 1].state.x3 * run.samples[i].state.x3 < 0.0) {
            emit("relay_flip", run.samples[i]);
        }
    }
}

void write_oracle_report(std::ostream& out, const ScenarioConfig& cfg, const OracleRun& run,
                         long enter_count) {
    out << "scenario = " << cfg.name << "\n";
    out << "mode = oracle\n";
    out << "kd = " << format_full(cfg.gains.kd) << "\n";
    out << "kp = " << format_full(cfg.gains.kp) << "\n";
    out << "ki = " << format_full(cfg.gains.ki) << "\n";
    out << "fc = " << format_full(cfg.fc) << "\n";
    out << "x0 = " << format_full(cfg.x0.x1) << ", " << format_full(cfg.x0.x2) << ", "
        << format_full(cfg.x0.x3) << "\n";
    out << "t_max = " << format_full(cfg.t_max) << "\n";
    out << "oracle_dt = " << format_full(run.dt) << "\n";
    out << "linearly_stable = " << (is_linearly_stable(cfg.gains) ? "true" : "false")
        << "\n";
    out << "stiction_entries = " << enter_count << "\n";
    const State& last = run.final_state();
    out << "final_state = " << format_full(last.x1) << ", " << format_full(last.x2) << ", "
        << format_full(last.x3) << "\n";
}

long count_oracle_stiction_entries(const OracleRun& run, const Gains& gains) {
    long count = 0;
    auto stick_at = [&](const OracleSample& s) {
        return s.state.x3 == 0.0 &&
               std::abs(gains.ki * s.state.x1 + gains.kp * s.state.x2) <= run.fc;
    };
    for (std::size_t i = 1; i < run.samples.size(); ++i) {
        if (!stick_at(run.samples[i - 1]) && stick_at(run.samples[i])) ++count;
    }
    return count;
}

void write_compare_report(std::ostream& out, const ScenarioConfig& cfg,
                          const CompareReport& rep) {
    out << "scenario = " << cfg.name << "\n";
    out << "oracle_dt = " << format_full(cfg.oracle_dt) << "\n";
    out << "compared_samples = " << rep.compared_samples << "\n";
    out << "sup_dev_x1 = " << format_full(rep.sup_dev[0]) << "\n";
    out << "sup_dev_x2 = " << format_full(rep.sup_dev[1]) << "\n";
    out << "sup_dev_x3 = " << format_full(rep.sup_dev[2]) << "\n";
    out << "max_dev = " << format_full(rep.max_dev) << "\n";
    out << "tolerance = " << format_full(rep.tol) << "\n";
    out << "verdict = " << (rep.pass ? "pass" : "fail") << "\n";
}

}  // namespace

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
    out << "t,x1,x2,x3,phase,u,V\n";
    bool first_row = true;
    double last_t = 0.0;
    for (const auto& seg : trace.segments) {
        const char* phase = seg.kind == PhaseKind::Stick ? "stick" : "slip";
        for (const auto& s : seg.samples) {
            if (!first_row && s.t == last_t) continue;  // shared boundary sample
            out << format_full(s.t) << ',' << format_full(s.state.x1) << ','
                << format_full(s.state.x2) << ',' << format_full(s.state.x3) << ','
                << phase << ',' << format_full(s.u) << ',' << format_full(s.v) << '\n';
            last_t = s.t;
            first_row = false;
        }
    }
}

std::vector<TraceRow> parse_trace_csv(std::istream& in) {
    std::vector<TraceRow> rows;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty trace CSV");
    if (line != "t,x1,x2,x3,phase,u,V") {
        throw std::runtime_error("unexpected trace CSV header: " + line);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        TraceRow row;
        std::getline(ss, field, ','); row.t = parse_strict(field);
        std::getline(ss, field, ','); row.x1 = parse_strict(field);
        std::getline(ss, field, ','); row.x2 = parse_strict(field);
        std::getline(ss, field, ','); row.x3 = parse_strict(field);
        std::getline(ss, field, ','); row.phase = field;
        std::getline(ss, field, ','); row.u = parse_strict(field);
        if (!std::getline(ss, field, ',')) throw std::runtime_error("short trace CSV row");
        row.v = parse_strict(field);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_events_csv(std::ostream& out, const Trace& trace) {
    out << "n,kind,t,x1,x2,x3\n";
    long n = 0;
    for (const auto& ev : trace.events) {
        const char* kind = "relay_flip";
        if (ev.kind == TraceEventKind::EnterStiction) kind = "enter_stiction";
        else if (ev.kind == TraceEventKind::StickExit) kind = "stick_exit";
        out << n++ << ',' << kind << ',' << format_full(ev.t) << ','
            << format_full(ev.state.x1) << ',' << format_full(ev.state.x2) << ','
            << format_full(ev.state.x3) << '\n';
    }
}

void write_report(std::ostream& out, const ScenarioConfig& cfg, const Trace& trace) {
    out << "scenario = " << cfg.name << "\n";
    out << "mode = engine\n";
    out << "kd = " << format_full(trace.gains.kd) << "\n";
    out << "kp = " << format_full(trace.gains.kp) << "\n";
    out << "ki = " << format_full(trace.gains.ki) << "\n";
    out << "fc = " << format_full(trace.fc) << "\n";
    out << "x0 = " << format_full(trace.initial.x1) << ", " << format_full(trace.initial.x2)
        << ", " << format_full(trace.initial.x3) << "\n";
    out << "t_max = " << format_full(cfg.t_max) << "\n";
    out << "output_rate = " << format_full(trace.output_rate) << "\n";
    out << "linearly_stable = " << (is_linearly_stable(trace.gains) ? "true" : "false")
        << "\n";
    const auto eig = eigenvalues(build_system(trace.gains, FrictionParams{trace.fc}));
    out << "eigenvalues =";
    for (const auto& lam : eig) {
        out << " (" << format_full(lam.real()) << ", " << format_full(lam.imag()) << ")";
    }
    out << "\n";
    out << "cycle_count = " << trace.cycle_count << "\n";
    out << "termination = " << to_string(trace.termination) << "\n";
    const State& last = trace.final_state();
    out << "final_state = " << format_full(last.x1) << ", " << format_full(last.x2) << ", "
        << format_full(last.x3) << "\n";
    out << "final_abs_x1 = " << format_full(std::abs(last.x1)) << "\n";
    const double bound = trace.gains.ki > 0.0
                             ? trace.fc / trace.gains.ki
                             : std::numeric_limits<double>::infinity();
    out << "lambda_bound = " << format_full(bound) << "\n";
    out << "final_x1_within_lambda = " << (std::abs(last.x1) <= bound ? "true" : "false")
        << "\n";
    out << "dissipated = " << format_full(trace.energy.dissipated) << "\n";
}

std::vector<std::pair<long, State>> grid_samples(const Trace& trace) {
    std::vector<std::pair<long, State>> out;
    long last_k = -1;
    for (const auto& seg : trace.segments) {
        for (const auto& s : seg.samples) {
            if (!s.on_grid) continue;
            const long k = grid_index(s.t, trace.output_rate);
            if (k == last_k) continue;
            out.emplace_back(k, s.state);
            last_k = k;
        }
    }
    return out;
}

RunArtifacts run_scenario(const ScenarioConfig& config) {
    const fs::path out_dir(config.out);
    fs::create_directories(out_dir);

    RunArtifacts artifacts;
    artifacts.out_dir = out_dir;

    if (config.mode == RunMode::Engine || config.mode == RunMode::Both) {
        Trace trace = simulate(config.x0, config.gains, FrictionParams{config.fc},
                               config.limits(), config.output_rate);
        {
            auto out = open_out(out_dir / "trace.csv");
            write_trace_csv(out, trace);
        }
        {
            auto out = open_out(out_dir / "events.csv");
            write_events_csv(out, trace);
        }
        {
            auto out = open_out(out_dir / "report.txt");
            write_report(out, config, trace);
        }
        artifacts.trace = std::move(trace);
    }

    if (config.mode == RunMode::Oracle || config.mode == RunMode::Both) {
        const auto sys = build_system(config.gains, FrictionParams{config.fc});
        const double steps_per_sample = 1.0 / (config.output_rate * config.oracle_dt);
        const long stride = std::max<long>(1, std::lround(steps_per_sample));
        OracleRun run = oracle_run(config.x0, sys, OracleConfig{config.oracle_dt, 0.0},
                                   config.t_max, stride);
        const bool prefix = config.mode == RunMode::Both;
        {
            auto out = open_out(out_dir / (prefix ? "oracle_trace.csv" : "trace.csv"));
            write_oracle_trace_csv(out, run, config.gains);
        }
        {
            auto out = open_out(out_dir / (prefix ? "oracle_events.csv" : "events.csv"));
            write_oracle_events_csv(out, run, config.gains);
        }
        {
            auto out = open_out(out_dir / (prefix ? "oracle_report.txt" : "report.txt"));
            write_oracle_report(out, config, run,
                                count_oracle_stiction_entries(run, config.gains));
        }
        artifacts.oracle = std::move(run);
    }

    if (config.mode == RunMode::Both) {
        const CompareReport rep = compare_runs(*artifacts.trace, *artifacts.oracle,
                                               config.compare_tol);
        auto out = open_out(out_dir / "compare.txt");
        write_compare_report(out, config, rep);

        auto dev = open_out(out_dir / "deviations.csv");
        dev << "t,dx1,dx2,dx3\n";
        const auto engine_grid = grid_samples(*artifacts.trace);
        std::size_t oi = 0;
        for (const auto& [k, state] : engine_grid) {
            while (oi < artifacts.oracle->samples.size() &&
                   grid_index(artifacts.oracle->samples[oi].t, config.output_rate) < k) {
                ++oi;
            }
            if (oi >= artifacts.oracle->samples.size()) break;
            const auto& os = artifacts.oracle->samples[oi];
            if (grid_index(os.t, config.output_rate) != k) continue;
            dev << format_full(static_cast<double>(k) / config.output_rate) << ','
                << format_full(state.x1 - os.state.x1) << ','
                << format_full(state.x2 - os.state.x2) << ','
                << format_full(state.x3 - os.state.x3) << '\n';
        }
    }

    return artifacts;
}

CompareReport compare_runs(const Trace& trace, const OracleRun& oracle, double tol) {
    if (trace.gains.kd != oracle.kd || trace.gains.kp != oracle.kp ||
        trace.gains.ki != oracle.ki || trace.fc != oracle.fc) {
        throw std::invalid_argument("compare: engine and oracle runs use different systems");
    }
    if (trace.initial.x1 != oracle.initial.x1 || trace.initial.x2 != oracle.initial.x2 ||
        trace.initial.x3 != oracle.initial.x3) {
        throw std::invalid_argument("compare: engine and oracle runs use different initial states");
    }
    if (!(tol > 0.0)) throw std::invalid_argument("compare: tolerance must be > 0");

    CompareReport rep;
    rep.tol = tol;

    const auto engine_grid = grid_samples(trace);
    std::size_t oi = 0;
    for (const auto& [k, state] : engine_grid) {
        while (oi < oracle.samples.size() &&
               grid_index(oracle.samples[oi].t, trace.output_rate) < k) {
            ++oi;
        }
        if (oi >= oracle.samples.size()) break;
        const auto& os = oracle.samples[oi];
        if (grid_index(os.t, trace.output_rate) != k) continue;
        rep.sup_dev[0] = std::max(rep.sup_dev[0], std::abs(state.x1 - os.state.x1));
        rep.sup_dev[1] = std::max(rep.sup_dev[1], std::abs(state.x2 - os.state.x2));
        rep.sup_dev[2] = std::max(rep.sup_dev[2], std::abs(state.x3 - os.state.x3));
        ++rep.compared_samples;
    }
    rep.max_dev = std::max({rep.sup_dev[0], rep.sup_dev[1], rep.sup_dev[2]});
    rep.pass = rep.compared_samples > 0 && rep.max_dev <= tol;
    return rep;
}

CompareReport compare_scenario(const ScenarioConfig& config) {
    ScenarioConfig cfg = config;
    cfg.mode = RunMode::Both;
    const RunArtifacts artifacts = run_scenario(cfg);
    return compare_runs(*artifacts.trace, *artifacts.oracle, cfg.compare_tol);
}

}  // namespace stickslip
