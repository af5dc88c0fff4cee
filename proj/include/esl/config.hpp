#pragma once
// Line-oriented `key = value` configuration with dotted keys, duplicate and
// unknown-key rejection, and range validation. Every error names the line.

#include <cctype>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "esl/fiber.hpp"
#include "esl/potentials.hpp"

namespace esl {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Scenario { bands, invert, defect, ssf, toeplitz, neumann, volume, verify };

struct RunConfig {
    Scenario scenario = Scenario::bands;
    // fiber
    double b = 1.0;
    BoundaryCondition bc = BoundaryCondition::Dirichlet;
    int n_x = 600;
    double pad = 12.0;
    // potential
    PotentialKind potential_kind = PotentialKind::radial_power;
    double C = 1.0;
    double m = 4.0;
    double R = 1.0;
    double A = 1.0;
    // sweep
    int j = 1;
    double lambda_min = 1e-4;
    double lambda_max = 1e-2;
    int points_per_decade = 6;
    double r = 0.3;
    int node_budget = 760;
    double k_min = -6.0;
    double k_max = 6.0;
    int n_nodes = 48;
    int perturbation_sign = 0;  // 0 = both, +1 / -1 = one side
    // misc
    std::string out_dir = "out";
    unsigned long seed = 0;

    // fully-defaulted echo, key -> value
    std::map<std::string, std::string> echo() const;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double parse_num(const std::string& v, const std::string& key, int line) {
    char* end = nullptr;
    double x = std::strtod(v.c_str(), &end);
    if (end == nullptr || *end != '\0' || v.empty())
        throw config_error("line " + std::to_string(line) + ": value for '" + key +
                           "' is not a number: '" + v + "'");
    return x;
}

inline long parse_int(const std::string& v, const std::string& key, int line) {
    double x = parse_num(v, key, line);
    long i = long(x);
    if (double(i) != x)
        throw config_error("line " + std::to_string(line) + ": value for '" + key +
                           "' must be an integer: '" + v + "'");
    return i;
}

}  // namespace detail

inline std::map<std::string, std::string> RunConfig::echo() const {
    auto num = [](double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        return os.str();
    };
    std::map<std::string, std::string> e;
    static const char* scen_names[] = {"bands",    "invert",  "defect", "ssf",
                                       "toeplitz", "neumann", "volume", "verify"};
    e["scenario"] = scen_names[int(scenario)];
    e["fiber.b"] = num(b);
    e["fiber.bc"] = (bc == BoundaryCondition::Dirichlet) ? "dirichlet" : "neumann";
    e["fiber.n_x"] = std::to_string(n_x);
    e["fiber.pad"] = num(pad);
    e["potential.kind"] =
        potential_kind == PotentialKind::radial_power ? "radial_power" : "compact_bump";
    e["potential.C"] = num(C);
    e["potential.m"] = num(m);
    e["potential.R"] = num(R);
    e["potential.A"] = num(A);
    e["sweep.j"] = std::to_string(j);
    e["sweep.lambda_min"] = num(lambda_min);
    e["sweep.lambda_max"] = num(lambda_max);
    e["sweep.points_per_decade"] = std::to_string(points_per_decade);
    e["sweep.r"] = num(r);
    e["sweep.node_budget"] = std::to_string(node_budget);
    e["sweep.k_min"] = num(k_min);
    e["sweep.k_max"] = num(k_max);
    e["sweep.n_nodes"] = std::to_string(n_nodes);
    e["sweep.perturbation_sign"] = std::to_string(perturbation_sign);
    e["output.dir"] = out_dir;
    e["seed"] = std::to_string(seed);
    return e;
}

inline RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::map<std::string, int> seen;  // key -> first line
    bool have_scenario = false;

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(lineno) +
                               ": expected 'key = value', got '" + detail::trim(raw) + "'");
        std::string key = detail::trim(line.substr(0, eq));
        std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw config_error("line " + std::to_string(lineno) + ": empty key");

        auto it = seen.find(key);
        if (it != seen.end())
            throw config_error("line " + std::to_string(lineno) + ": duplicate key '" +
                               key + "' (first set on line " +
                               std::to_string(it->second) + ")");
        seen[key] = lineno;

        auto bad = [&](const std::string& why) -> config_error {
            return config_error("line " + std::to_string(lineno) + ": " + key + " " + why);
        };

        if (key == "scenario") {
            if (val == "bands") cfg.scenario = Scenario::bands;
            else if (val == "invert") cfg.scenario = Scenario::invert;
            else if (val == "defect") cfg.scenario = Scenario::defect;
            else if (val == "ssf") cfg.scenario = Scenario::ssf;
            else if (val == "toeplitz") cfg.scenario = Scenario::toeplitz;
            else if (val == "neumann") cfg.scenario = Scenario::neumann;
            else if (val == "volume") cfg.scenario = Scenario::volume;
            else if (val == "verify") cfg.scenario = Scenario::verify;
            else throw bad("must be one of bands, invert, defect, ssf, toeplitz, neumann, volume, verify (got '" + val + "')");
            have_scenario = true;
        } else if (key == "fiber.b") {
            cfg.b = detail::parse_num(val, key, lineno);
            if (!(cfg.b > 0.0)) throw bad("must be > 0");
        } else if (key == "fiber.bc") {
            if (val == "dirichlet") cfg.bc = BoundaryCondition::Dirichlet;
            else if (val == "neumann") cfg.bc = BoundaryCondition::Neumann;
            else throw bad("must be 'dirichlet' or 'neumann' (got '" + val + "')");
        } else if (key == "fiber.n_x") {
            cfg.n_x = int(detail::parse_int(val, key, lineno));
            if (cfg.n_x < 50 || cfg.n_x > 100000) throw bad("must be in [50, 100000]");
        } else if (key == "fiber.pad") {
            cfg.pad = detail::parse_num(val, key, lineno);
            if (!(cfg.pad >= 6.0 && cfg.pad <= 40.0)) throw bad("must be in [6, 40]");
        } else if (key == "potential.kind") {
            if (val == "radial_power") cfg.potential_kind = PotentialKind::radial_power;
            else if (val == "compact_bump") cfg.potential_kind = PotentialKind::compact_bump;
            else throw bad("must be 'radial_power' or 'compact_bump' (got '" + val + "')");
        } else if (key == "potential.C") {
            cfg.C = detail::parse_num(val, key, lineno);
            if (!(cfg.C > 0.0)) throw bad("must be > 0");
        } else if (key == "potential.m") {
            cfg.m = detail::parse_num(val, key, lineno);
            if (!(cfg.m > 2.0)) throw bad("must be > 2 (decay condition)");
        } else if (key == "potential.R") {
            cfg.R = detail::parse_num(val, key, lineno);
            if (!(cfg.R > 0.0)) throw bad("must be > 0");
        } else if (key == "potential.A") {
            cfg.A = detail::parse_num(val, key, lineno);
            if (!(cfg.A > 0.0)) throw bad("must be > 0");
        } else if (key == "sweep.j") {
            cfg.j = int(detail::parse_int(val, key, lineno));
            if (cfg.j < 1 || cfg.j > 8) throw bad("must be in [1, 8]");
        } else if (key == "sweep.lambda_min") {
            cfg.lambda_min = detail::parse_num(val, key, lineno);
            if (!(cfg.lambda_min > 0.0)) throw bad("must be > 0");
        } else if (key == "sweep.lambda_max") {
            cfg.lambda_max = detail::parse_num(val, key, lineno);
            if (!(cfg.lambda_max > 0.0)) throw bad("must be > 0");
        } else if (key == "sweep.points_per_decade") {
            cfg.points_per_decade = int(detail::parse_int(val, key, lineno));
            if (cfg.points_per_decade < 1 || cfg.points_per_decade > 64)
                throw bad("must be in [1, 64]");
        } else if (key == "sweep.r") {
            cfg.r = detail::parse_num(val, key, lineno);
            if (!(cfg.r > 0.0 && cfg.r < 1.0)) throw bad("must be in (0, 1)");
        } else if (key == "sweep.node_budget") {
            cfg.node_budget = int(detail::parse_int(val, key, lineno));
            if (cfg.node_budget < 200 || cfg.node_budget > 4000)
                throw bad("must be in [200, 4000]");
        } else if (key == "sweep.k_min") {
            cfg.k_min = detail::parse_num(val, key, lineno);
        } else if (key == "sweep.k_max") {
            cfg.k_max = detail::parse_num(val, key, lineno);
        } else if (key == "sweep.n_nodes") {
            cfg.n_nodes = int(detail::parse_int(val, key, lineno));
            if (cfg.n_nodes < 16 || cfg.n_nodes > 2000) throw bad("must be in [16, 2000]");
        } else if (key == "sweep.perturbation_sign") {
            long s = detail::parse_int(val, key, lineno);
            if (s != -1 && s != 0 && s != 1) throw bad("must be -1, 0, or 1");
            cfg.perturbation_sign = int(s);
        } else if (key == "output.dir") {
            if (val.empty()) throw bad("must not be empty");
            cfg.out_dir = val;
        } else if (key == "seed") {
            long s = detail::parse_int(val, key, lineno);
            if (s < 0) throw bad("must be >= 0");
            cfg.seed = (unsigned long)(s);
        } else {
            throw config_error("line " + std::to_string(lineno) + ": unknown key '" +
                               key + "'");
        }
    }
    if (!have_scenario) throw config_error("missing required key 'scenario'");
    if (!(cfg.lambda_min <= cfg.lambda_max))
        throw config_error("sweep.lambda_min must be <= sweep.lambda_max");
    if (!(cfg.k_min < cfg.k_max))
        throw config_error("sweep.k_min must be < sweep.k_max");
    return cfg;
}

inline FiberSpec fiber_spec_of(const RunConfig& cfg) {
    FiberSpec s;
    s.b = cfg.b;
    s.bc = cfg.bc;
    s.n_x = cfg.n_x;
    s.pad = cfg.pad;
    return s;
}

inline PotentialModel potential_of(const RunConfig& cfg) {
    PotentialModel P;
    P.kind = cfg.potential_kind;
    P.C = cfg.C;
    P.m = cfg.m;
    P.R = cfg.R;
    P.A = cfg.A;
    return P;
}

}  // namespace esl
