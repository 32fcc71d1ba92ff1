#pragma once

#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stickslip/engine.hpp"

namespace stickslip {

enum class RunMode { Engine, Oracle, Both };

/// One simulation scenario, parseable from a flat `key = value` file.
struct ScenarioConfig {
    std::string name{"scenario"};
    Gains gains;
    double fc{0.0};
    State x0;
    double t_max{100.0};
    long max_cycles{1000000};
    double eps_lambda{0.0};  ///< 0 -> engine default
    double output_rate{1000.0};
    std::string out{"out"};
    RunMode mode{RunMode::Engine};

    // tuning knobs beyond the required keys
    double oracle_dt{1e-6};
    double compare_tol{1e-6};
    double divergence_bound{0.0};
    int chatter_max_flips{64};
    double chatter_window{1e-9};

    SimulationLimits limits() const {
        return SimulationLimits{t_max, max_cycles, eps_lambda, divergence_bound,
                                chatter_max_flips, chatter_window};
    }
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses the flat config format: one `key = value` per line, `#` comments,
/// vectors comma-separated (x0 = 0, -1.1, 0). Unknown keys are rejected.
/// Throws ConfigError on any malformed or missing input.
ScenarioConfig parse_config(std::istream& in, const std::string& name = "config");
ScenarioConfig parse_config_file(const std::string& path);

struct Preset {
    std::string name;
    ScenarioConfig config;
};

/// The built-in scenario presets.
const std::vector<Preset>& presets();

/// Looks a preset up by name ("example1" is an alias for "example1b").
/// Throws ConfigError for unknown names.
ScenarioConfig preset_config(std::string_view name);

/// Overrides one scalar parameter (kd, kp, ki, fc, x1_0, x2_0, x3_0) for
/// sweep runs. Throws ConfigError for unknown parameter names.
void apply_sweep_value(ScenarioConfig& config, const std::string& param, double value);

RunMode parse_mode(std::string_view text);
const char* to_string(RunMode mode);

}  // namespace stickslip
