#include "stickslip/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace stickslip {
namespace {

std::string trim(std::string_view s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string_view::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(begin, end - begin + 1));
}

double parse_double(const std::string& text, const std::string& key) {
    const std::string t = trim(text);
    if (t.empty()) throw ConfigError("empty value for '" + key + "'");
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) {
        throw ConfigError("malformed number '" + t + "' for '" + key + "'");
    }
    if (!std::isfinite(v)) throw ConfigError("'" + key + "' must be finite");
    return v;
}

long parse_long(const std::string& text, const std::string& key) {
    const double v = parse_double(text, key);
    if (v != std::floor(v)) throw ConfigError("'" + key + "' must be an integer");
    return static_cast<long>(v);
}

std::vector<double> parse_vector(const std::string& text, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(item, key));
    return out;
}

ScenarioConfig make_preset(std::string name, double kd, double kp, double ki, double fc,
                           State x0, double t_max, double output_rate) {
    ScenarioConfig cfg;
    cfg.name = std::move(name);
    cfg.gains = Gains{kd, kp, ki};
    cfg.fc = fc;
    cfg.x0 = x0;
    cfg.t_max = t_max;
    cfg.output_rate = output_rate;
    return cfg;
}

std::vector<Preset> build_presets() {
    std::vector<Preset> out;
    auto add = [&](ScenarioConfig cfg) { out.push_back({cfg.name, std::move(cfg)}); };

    add(make_preset("example1a", 0.0, 100.0, 1.0, 0.0, {0.0, 0.0, 10.0}, 60.0, 1000.0));
    add(make_preset("example1b", 0.0, 100.0, 1.0, 1.0, {0.0, 0.0, 10.0}, 60.0, 1000.0));
    add(make_preset("example2a", 20.0, 100.0, 1000.0, 50.0, {0.0, -1.1, 0.0}, 120.0, 1000.0));
    add(make_preset("example2b", 20.0, 100.0, 1000.0, 75.0, {0.0, -1.1, 0.0}, 120.0, 1000.0));
    add(make_preset("example2c", 20.0, 100.0, 1000.0, 100.0, {0.0, -1.1, 0.0}, 120.0, 1000.0));
    add(make_preset("example3", 10.0, 1040.0, 8000.0, 100.0, {0.0, -0.15, 0.0}, 60.0, 1000.0));
    add(make_preset("example4a", 56.0, 1040.0, 6400.0, 100.0, {0.0, -0.2, 0.0}, 20.0, 1000.0));
    add(make_preset("example4b", 56.0, 1040.0, 6400.0, 100.0, {0.0, -0.25, 0.0}, 20.0, 1000.0));
    add(make_preset("example4c", 56.0, 1040.0, 6400.0, 100.0, {0.0, -0.3, 0.0}, 20.0, 1000.0));
    add(make_preset("example4d", 56.0, 1040.0, 6400.0, 100.0, {0.0, -0.35, 0.0}, 20.0, 1000.0));
    add(make_preset("example5", 20.0, 100.0, 1000.0, 50.0, {0.0, -0.5, 0.0}, 1e5, 1.0));
    return out;
}

}  // namespace

ScenarioConfig parse_config(std::istream& in, const std::string& name) {
    ScenarioConfig cfg;
    cfg.name = name;

    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        if (!kv.emplace(key, value).second) {
            throw ConfigError("duplicate key '" + key + "'");
        }
    }

    bool saw_kd = false, saw_kp = false, saw_ki = false, saw_fc = false, saw_x0 = false,
         saw_tmax = false;
    for (const auto& [key, value] : kv) {
        if (key == "kd") { cfg.gains.kd = parse_double(value, key); saw_kd = true; }
        else if (key == "kp") { cfg.gains.kp = parse_double(value, key); saw_kp = true; }
        else if (key == "ki") { cfg.gains.ki = parse_double(value, key); saw_ki = true; }
        else if (key == "fc") { cfg.fc = parse_double(value, key); saw_fc = true; }
        else if (key == "x0") {
            const auto v = parse_vector(value, key);
            if (v.size() != 3) throw ConfigError("'x0' must have exactly 3 components");
            cfg.x0 = State{v[0], v[1], v[2]};
            saw_x0 = true;
        }
        else if (key == "t_max") { cfg.t_max = parse_double(value, key); saw_tmax = true; }
        else if (key == "max_cycles") { cfg.max_cycles = parse_long(value, key); }
        else if (key == "eps_lambda") { cfg.eps_lambda = parse_double(value, key); }
        else if (key == "output_rate") { cfg.output_rate = parse_double(value, key); }
        else if (key == "out") { cfg.out = value; }
        else if (key == "mode") { cfg.mode = parse_mode(value); }
        else if (key == "oracle_dt") { cfg.oracle_dt = parse_double(value, key); }
        else if (key == "compare_tol") { cfg.compare_tol = parse_double(value, key); }
        else if (key == "divergence_bound") { cfg.divergence_bound = parse_double(value, key); }
        else if (key == "chatter_max_flips") {
            cfg.chatter_max_flips = static_cast<int>(parse_long(value, key));
        }
        else if (key == "chatter_window") { cfg.chatter_window = parse_double(value, key); }
        else {
            throw ConfigError("unknown key '" + key + "'");
        }
    }

    if (!saw_kd || !saw_kp || !saw_ki) throw ConfigError("kd, kp and ki are required");
    if (!saw_fc) throw ConfigError("fc is required");
    if (!saw_x0) throw ConfigError("x0 is required");
    if (!saw_tmax) throw ConfigError("t_max is required");

    if (!(cfg.t_max > 0.0)) throw ConfigError("t_max must be > 0");
    if (!(cfg.output_rate > 0.0)) throw ConfigError("output_rate must be > 0");
    if (cfg.max_cycles <= 0) throw ConfigError("max_cycles must be > 0");
    if (!(cfg.oracle_dt > 0.0)) throw ConfigError("oracle_dt must be > 0");
    return cfg;
}

ScenarioConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

const std::vector<Preset>& presets() {
    static const std::vector<Preset> table = build_presets();
    return table;
}

ScenarioConfig preset_config(std::string_view name) {
    const std::string_view resolved = (name == "example1") ? "example1b" : name;
    for (const auto& p : presets()) {
        if (p.name == resolved) return p.config;
    }
    std::string known;
    for (const auto& p : presets()) {
        known += known.empty() ? p.name : ", " + p.name;
    }
    throw ConfigError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

void apply_sweep_value(ScenarioConfig& config, const std::string& param, double value) {
    if (param == "kd") config.gains.kd = value;
    else if (param == "kp") config.gains.kp = value;
    else if (param == "ki") config.gains.ki = value;
    else if (param == "fc") config.fc = value;
    else if (param == "x1_0") config.x0.x1 = value;
    else if (param == "x2_0") config.x0.x2 = value;
    else if (param == "x3_0") config.x0.x3 = value;
    else throw ConfigError("unknown sweep parameter '" + param + "'");
}

RunMode parse_mode(std::string_view text) {
    if (text == "engine") return RunMode::Engine;
    if (text == "oracle") return RunMode::Oracle;
    if (text == "both") return RunMode::Both;
    throw ConfigError("mode must be one of engine|oracle|both");
}

const char* to_string(RunMode mode) {
    switch (mode) {
        case RunMode::Engine: return "engine";
        case RunMode::Oracle: return "oracle";
        case RunMode::Both: return "both";
    }
    return "unknown";
}

}  // namespace stickslip
