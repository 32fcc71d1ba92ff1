#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stickslip/oracle.hpp"
#include "stickslip/scenario.hpp"

namespace stickslip {

/// Full-precision decimal rendering (17 significant digits); parsing the
/// result back reproduces the double bit-exactly.
std::string format_full(double v);

struct TraceRow {
    double t{0.0};
    double x1{0.0}, x2{0.0}, x3{0.0};
    std::string phase;
    double u{0.0};
    double v{0.0};
};

/// trace.csv: header `t,x1,x2,x3,phase,u,V`, one row per sample.
void write_trace_csv(std::ostream& out, const Trace& trace);
std::vector<TraceRow> parse_trace_csv(std::istream& in);

/// events.csv: header `n,kind,t,x1,x2,x3`, one row per phase boundary.
void write_events_csv(std::ostream& out, const Trace& trace);

/// report.txt: parameters, stability verdict, eigenvalues, cycle count,
/// termination reason and the final |x1| against the fc/ki bound.
void write_report(std::ostream& out, const ScenarioConfig& config, const Trace& trace);

/// Uniform-grid samples of a trace: (k, state) with t = k / output_rate.
std::vector<std::pair<long, State>> grid_samples(const Trace& trace);

struct RunArtifacts {
    std::filesystem::path out_dir;
    std::optional<Trace> trace;        ///< engine trace (mode engine/both)
    std::optional<OracleRun> oracle;   ///< oracle run (mode oracle/both)
};

/// Runs one scenario and emits trace.csv, events.csv and report.txt into
/// config.out (oracle-mode files are derived from the oracle samples; mode
/// both adds oracle_*.csv and compare.txt).
RunArtifacts run_scenario(const ScenarioConfig& config);

struct CompareReport {
    std::array<double, 3> sup_dev{0.0, 0.0, 0.0};  ///< per-component sup over the grid
    double max_dev{0.0};
    double tol{0.0};
    bool pass{false};
    long compared_samples{0};
};

/// Deviation between an engine trace and an oracle run over the shared
/// uniform sample grid. Throws std::invalid_argument when the two runs do
/// not describe the same system and initial state.
CompareReport compare_runs(const Trace& trace, const OracleRun& oracle, double tol);

/// Runs engine and oracle on the same scenario, writes deviations.csv and
/// compare.txt into config.out and returns the deviation report.
CompareReport compare_scenario(const ScenarioConfig& config);

}  // namespace stickslip
