// Command-line front end: scenario runs, engine/oracle comparison, presets.
//
// Exit codes: 0 ok, 2 config error, 3 divergence, 4 chatter.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stickslip/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitChatter = 4;

struct CommonOptions {
    std::string preset;
    std::string config_path;
    std::string out;
    std::string mode;
    double rate{0.0};
    std::string sweep;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    auto* preset = cmd->add_option("--preset", opt.preset, "built-in scenario name");
    auto* config = cmd->add_option("--config", opt.config_path, "scenario config file");
    preset->excludes(config);
    config->excludes(preset);
    cmd->add_option("--out", opt.out, "output directory (overrides the config)");
    cmd->add_option("--mode", opt.mode, "engine|oracle|both (overrides the config)");
    cmd->add_option("--rate", opt.rate, "output sample rate in Hz (overrides the config)");
    cmd->add_option("--sweep", opt.sweep, "PARAM=a,b,c parameter sweep");
}

stickslip::ScenarioConfig load_config(const CommonOptions& opt) {
    stickslip::ScenarioConfig cfg;
    if (!opt.preset.empty()) {
        cfg = stickslip::preset_config(opt.preset);
    } else if (!opt.config_path.empty()) {
        cfg = stickslip::parse_config_file(opt.config_path);
    } else {
        throw stickslip::ConfigError("one of --preset or --config is required");
    }
    if (!opt.out.empty()) cfg.out = opt.out;
    if (!opt.mode.empty()) cfg.mode = stickslip::parse_mode(opt.mode);
    if (opt.rate > 0.0) cfg.output_rate = opt.rate;
    return cfg;
}

struct SweepSpec {
    std::string param;
    std::vector<double> values;
};

SweepSpec parse_sweep(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
        throw stickslip::ConfigError("--sweep expects PARAM=a,b,c");
    }
    SweepSpec spec;
    spec.param = text.substr(0, eq);
    std::stringstream ss(text.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (end != item.c_str() + item.size() || item.empty()) {
            throw stickslip::ConfigError("malformed sweep value '" + item + "'");
        }
        spec.values.push_back(v);
    }
    if (spec.values.empty()) throw stickslip::ConfigError("--sweep needs at least one value");
    return spec;
}

struct VariantResult {
    double value{0.0};
    int exit_code{kExitOk};
    std::string summary;
};

VariantResult run_variant(stickslip::ScenarioConfig cfg, const std::string& param,
                          double value, bool compare) {
    VariantResult result;
    result.value = value;
    try {
        stickslip::apply_sweep_value(cfg, param, value);
        std::ostringstream dir_name;
        dir_name << param << "_" << value;
        cfg.out = (std::filesystem::path(cfg.out) / dir_name.str()).string();
        if (compare) {
            const auto rep = stickslip::compare_scenario(cfg);
            std::ostringstream line;
            line << "max_dev = " << stickslip::format_full(rep.max_dev)
                 << ", verdict = " << (rep.pass ? "pass" : "fail");
            result.summary = line.str();
        } else {
            const auto artifacts = stickslip::run_scenario(cfg);
            if (artifacts.trace.has_value()) {
                const auto& tr = *artifacts.trace;
                std::ostringstream line;
                line << "termination = " << stickslip::to_string(tr.termination)
                     << ", cycles = " << tr.cycle_count;
                result.summary = line.str();
                if (tr.termination == stickslip::Termination::ChatterDetected) {
                    result.exit_code = kExitChatter;
                }
            } else {
                result.summary = "oracle run complete";
            }
        }
    } catch (const stickslip::DivergenceDetected& e) {
        result.exit_code = kExitDivergence;
        result.summary = std::string("divergence: ") + e.what();
    } catch (const stickslip::ChatterDetected& e) {
        result.exit_code = kExitChatter;
        result.summary = std::string("chatter: ") + e.what();
    } catch (const stickslip::ConfigError& e) {
        result.exit_code = kExitConfig;
        result.summary = std::string("config error: ") + e.what();
    }
    return result;
}

int run_sweep(const stickslip::ScenarioConfig& base, const SweepSpec& spec, bool compare) {
    std::vector<std::future<VariantResult>> futures;
    futures.reserve(spec.values.size());
    for (double v : spec.values) {
        futures.push_back(std::async(std::launch::async, run_variant, base, spec.param, v,
                                     compare));
    }
    std::vector<VariantResult> results;
    results.reserve(futures.size());
    for (auto& f : futures) results.push_back(f.get());

    std::filesystem::create_directories(base.out);
    std::ofstream report(std::filesystem::path(base.out) / "sweep_report.txt");
    int exit_code = kExitOk;
    report << "scenario = " << base.name << "\n";
    report << "sweep_param = " << spec.param << "\n";
    for (const auto& r : results) {
        report << spec.param << " = " << stickslip::format_full(r.value) << ": " << r.summary
               << "\n";
        std::cout << spec.param << " = " << r.value << ": " << r.summary << "\n";
        exit_code = std::max(exit_code, r.exit_code);
    }
    return exit_code;
}

int run_command(const CommonOptions& opt, bool compare) {
    const stickslip::ScenarioConfig cfg = load_config(opt);
    if (!opt.sweep.empty()) {
        return run_sweep(cfg, parse_sweep(opt.sweep), compare);
    }
    if (compare) {
        const auto rep = stickslip::compare_scenario(cfg);
        std::cout << "compared_samples = " << rep.compared_samples << "\n"
                  << "max_dev = " << stickslip::format_full(rep.max_dev) << "\n"
                  << "verdict = " << (rep.pass ? "pass" : "fail") << "\n";
        return kExitOk;
    }
    const auto artifacts = stickslip::run_scenario(cfg);
    if (artifacts.trace.has_value()) {
        const auto& tr = *artifacts.trace;
        std::cout << "termination = " << stickslip::to_string(tr.termination) << "\n"
                  << "cycles = " << tr.cycle_count << "\n"
                  << "output = " << artifacts.out_dir.string() << "\n";
        if (tr.termination == stickslip::Termination::ChatterDetected) return kExitChatter;
    } else {
        std::cout << "output = " << artifacts.out_dir.string() << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stick-slip dynamics simulator for PID loops with Coulomb friction"};
    app.require_subcommand(1);

    CommonOptions run_opt;
    auto* run_cmd = app.add_subcommand("run", "simulate a scenario and emit CSV files");
    add_common(run_cmd, run_opt);

    CommonOptions cmp_opt;
    auto* cmp_cmd =
        app.add_subcommand("compare", "run engine and oracle, report their deviation");
    add_common(cmp_cmd, cmp_opt);

    auto* presets_cmd = app.add_subcommand("presets", "list the built-in scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (presets_cmd->parsed()) {
            for (const auto& p : stickslip::presets()) {
                const auto& c = p.config;
                std::printf("%-10s kd=%-5g kp=%-6g ki=%-6g fc=%-5g x0=(%g, %g, %g) t_max=%g\n",
                            p.name.c_str(), c.gains.kd, c.gains.kp, c.gains.ki, c.fc, c.x0.x1,
                            c.x0.x2, c.x0.x3, c.t_max);
            }
            return kExitOk;
        }
        if (run_cmd->parsed()) return run_command(run_opt, false);
        if (cmp_cmd->parsed()) return run_command(cmp_opt, true);
    } catch (const stickslip::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const stickslip::DivergenceDetected& e) {
        std::cerr << "divergence detected: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const stickslip::ChatterDetected& e) {
        std::cerr << "chatter detected: " << e.what() << "\n";
        return kExitChatter;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
