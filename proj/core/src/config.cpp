#include "nsverify/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace nsverify {

int RunConfig::n_steps() const {
    return static_cast<int>(std::llround(T_final / tau));
}

void RunConfig::validate() const {
    if (mesh_n < 2) throw ConfigError("mesh.n must be >= 2");
    if (!(tau > 0.0)) throw ConfigError("tau must be > 0");
    if (!(nu > 0.0)) throw ConfigError("nu must be > 0");
    if (!(T_final >= tau)) throw ConfigError("T must be >= tau");
    const double steps = T_final / tau;
    if (std::abs(steps - std::llround(steps)) > 1e-12 * std::max(1.0, steps))
        throw ConfigError("T/tau must be integral (node-aligned horizon)");
    if (initial_data.id != "taylor_green" && initial_data.id != "zero" &&
        initial_data.id != "custom")
        throw ConfigError("initial_data.id must be taylor_green, zero or custom");
    if (initial_data.id == "custom" && initial_data.modes.empty())
        throw ConfigError("initial_data.id=custom requires initial_data.modes");
    if (forcing.mode != "zero" && forcing.mode != "affine" &&
        forcing.mode != "analytic-sampled")
        throw ConfigError(
            "forcing.mode must be zero, affine or analytic-sampled");
    if (forcing.mode != "zero" && forcing.id.empty())
        throw ConfigError("non-zero forcing requires forcing.id");
    if (!(solver.newton_tol > 0.0)) throw ConfigError("solver.newton_tol must be > 0");
    if (solver.newton_max_iter < 1)
        throw ConfigError("solver.newton_max_iter must be >= 1");
    if (solver.linear_solver != "sparse_lu")
        throw ConfigError("solver.linear_solver: only sparse_lu is available");
}

std::string RunConfig::canonical() const {
    std::ostringstream os;
    os.precision(17);
    os << "mesh.n=" << mesh_n << ";tau=" << tau << ";T=" << T_final
       << ";nu=" << nu << ";initial_data.id=" << initial_data.id
       << ";initial_data.amplitude=" << initial_data.amplitude
       << ";initial_data.discrete_as_exact=" << initial_data.discrete_as_exact;
    for (const auto& m : initial_data.modes) {
        os << ";mode=";
        for (double v : m) os << v << ',';
    }
    os << ";forcing.mode=" << forcing.mode << ";forcing.id=" << forcing.id
       << ";forcing.amplitude=" << forcing.amplitude;
    for (const auto& [k, v] : constant_overrides)
        os << ";constants." << k << "=" << v;
    os << ";solver.newton_tol=" << solver.newton_tol
       << ";solver.newton_max_iter=" << solver.newton_max_iter
       << ";solver.linear_solver=" << solver.linear_solver;
    return os.str();
}

std::string RunConfig::hash() const {
    const std::string s = canonical();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

namespace {

bool is_known_constant(const std::string& name) {
    static const char* names[] = {"c_e1", "c_e2", "c_Pi1", "c_Pi2", "c_ell",
                                  "c_i1", "c_i2", "c_i3",  "c_H1"};
    for (const char* n : names)
        if (name == n) return true;
    return false;
}

void assign_kv(RunConfig& cfg, const std::string& key, const std::string& value,
               int line) {
    auto fail = [&](const std::string& what) {
        throw ConfigError("line " + std::to_string(line) + ": " + what);
    };
    auto as_double = [&]() {
        try {
            std::size_t pos = 0;
            const double v = std::stod(value, &pos);
            if (pos != value.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            fail("expected a number for '" + key + "', got '" + value + "'");
            return 0.0;
        }
    };
    auto as_bool = [&]() {
        if (value == "true" || value == "1") return true;
        if (value == "false" || value == "0") return false;
        fail("expected a boolean for '" + key + "'");
        return false;
    };

    if (key == "mesh.n")
        cfg.mesh_n = static_cast<int>(as_double());
    else if (key == "tau")
        cfg.tau = as_double();
    else if (key == "T")
        cfg.T_final = as_double();
    else if (key == "nu")
        cfg.nu = as_double();
    else if (key == "initial_data.id")
        cfg.initial_data.id = value;
    else if (key == "initial_data.amplitude")
        cfg.initial_data.amplitude = as_double();
    else if (key == "initial_data.discrete_as_exact")
        cfg.initial_data.discrete_as_exact = as_bool();
    else if (key == "forcing.mode")
        cfg.forcing.mode = value;
    else if (key == "forcing.id")
        cfg.forcing.id = value;
    else if (key == "forcing.amplitude")
        cfg.forcing.amplitude = as_double();
    else if (key.rfind("constants.", 0) == 0) {
        const std::string name = key.substr(10);
        if (!is_known_constant(name)) fail("unknown constant '" + name + "'");
        cfg.constant_overrides[name] = as_double();
    } else if (key == "solver.newton_tol")
        cfg.solver.newton_tol = as_double();
    else if (key == "solver.newton_max_iter")
        cfg.solver.newton_max_iter = static_cast<int>(as_double());
    else if (key == "solver.linear_solver")
        cfg.solver.linear_solver = value;
    else if (key == "output.report")
        cfg.output.report = value;
    else if (key == "output.csv_dir")
        cfg.output.csv_dir = value;
    else if (key == "output.trajectory")
        cfg.output.trajectory = value;
    else
        fail("unknown key '" + key + "'");
}

RunConfig parse_json(const std::string& text, const std::string& name) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(name + ": " + e.what());
    }
    RunConfig cfg;
    try {
        if (j.contains("mesh")) cfg.mesh_n = j["mesh"].value("n", cfg.mesh_n);
        cfg.tau = j.value("tau", cfg.tau);
        cfg.T_final = j.value("T", cfg.T_final);
        cfg.nu = j.value("nu", cfg.nu);
        if (j.contains("initial_data")) {
            const auto& id = j["initial_data"];
            cfg.initial_data.id = id.value("id", cfg.initial_data.id);
            cfg.initial_data.amplitude =
                id.value("amplitude", cfg.initial_data.amplitude);
            cfg.initial_data.discrete_as_exact = id.value(
                "discrete_as_exact", cfg.initial_data.discrete_as_exact);
            if (id.contains("modes"))
                for (const auto& m : id["modes"]) {
                    std::array<double, 6> mode{};
                    for (int c = 0; c < 6; ++c) mode[c] = m.at(c).get<double>();
                    cfg.initial_data.modes.push_back(mode);
                }
        }
        if (j.contains("forcing")) {
            const auto& f = j["forcing"];
            cfg.forcing.mode = f.value("mode", cfg.forcing.mode);
            cfg.forcing.id = f.value("id", cfg.forcing.id);
            cfg.forcing.amplitude = f.value("amplitude", cfg.forcing.amplitude);
        }
        if (j.contains("constants"))
            for (const auto& [k, v] : j["constants"].items()) {
                if (!is_known_constant(k))
                    throw ConfigError(name + ": unknown constant '" + k + "'");
                cfg.constant_overrides[k] = v.get<double>();
            }
        if (j.contains("solver")) {
            const auto& s = j["solver"];
            cfg.solver.newton_tol = s.value("newton_tol", cfg.solver.newton_tol);
            cfg.solver.newton_max_iter =
                s.value("newton_max_iter", cfg.solver.newton_max_iter);
            cfg.solver.linear_solver =
                s.value("linear_solver", cfg.solver.linear_solver);
        }
        if (j.contains("output")) {
            const auto& o = j["output"];
            cfg.output.report = o.value("report", cfg.output.report);
            cfg.output.csv_dir = o.value("csv_dir", cfg.output.csv_dir);
            cfg.output.trajectory = o.value("trajectory", cfg.output.trajectory);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(name + ": " + e.what());
    }
    return cfg;
}

}  // namespace

RunConfig parse_config_text(const std::string& text,
                            const std::string& source_name) {
    // Sniff: a JSON document starts with '{'.
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        if (c == '{') {
            RunConfig cfg = parse_json(text, source_name);
            cfg.validate();
            return cfg;
        }
        break;
    }
    RunConfig cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string{}
                                          : s.substr(a, b - a + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(source_name + ": line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        assign_kv(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)),
                  lineno);
    }
    cfg.validate();
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path);
}

}  // namespace nsverify
