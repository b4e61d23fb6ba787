#include "towlab/harness/config.hpp"

#include "towlab/core/errors.hpp"
#include "towlab/core/io.hpp"

#include <fstream>
#include <functional>
#include <sstream>

namespace towlab {
namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

double parse_number(const std::string& v, const std::string& key) {
    try {
        size_t used = 0;
        const double x = std::stod(v, &used);
        if (trim(v.substr(used)).empty()) return x;
    } catch (...) {
    }
    throw ConfigError("config: bad numeric value for '" + key + "': " + v);
}

Eigen::VectorXd parse_vector(const std::string& v, const std::string& key) {
    std::vector<double> parts;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw ConfigError("config: empty vector component in '" + key + "'");
        parts.push_back(parse_number(item, key));
    }
    if (parts.empty()) throw ConfigError("config: empty vector for '" + key + "'");
    Eigen::VectorXd out(static_cast<int>(parts.size()));
    for (size_t i = 0; i < parts.size(); ++i) out[static_cast<int>(i)] = parts[i];
    return out;
}

std::string vector_to_string(const Eigen::VectorXd& v) {
    std::string s;
    for (int i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += format_double(v[i]);
    }
    return s;
}

} // namespace

InstanceConfig parse_config_text(const std::string& text) {
    InstanceConfig cfg;
    using Setter = std::function<void(const std::string&, const std::string&)>;
    const std::map<std::string, Setter> setters = {
        {"n", [&](const std::string& k, const std::string& v) { cfg.n = static_cast<int>(parse_number(v, k)); }},
        {"T", [&](const std::string& k, const std::string& v) { cfg.T = parse_number(v, k); }},
        {"R", [&](const std::string& k, const std::string& v) { cfg.R = parse_number(v, k); }},
        {"h", [&](const std::string& k, const std::string& v) { cfg.h = parse_number(v, k); }},
        {"dt", [&](const std::string& k, const std::string& v) { cfg.dt = parse_number(v, k); }},
        {"mu", [&](const std::string& k, const std::string& v) { cfg.mu = parse_vector(v, k); }},
        {"r", [&](const std::string& k, const std::string& v) { cfg.r = parse_number(v, k); }},
        {"p_field", [&](const std::string&, const std::string& v) { cfg.p_field = v; }},
        {"p0", [&](const std::string& k, const std::string& v) { cfg.p0 = parse_number(v, k); }},
        {"p_base", [&](const std::string& k, const std::string& v) { cfg.p_base = parse_number(v, k); }},
        {"p_amp", [&](const std::string& k, const std::string& v) { cfg.p_amp = parse_number(v, k); }},
        {"payoff", [&](const std::string&, const std::string& v) { cfg.payoff = v; }},
        {"payoff_amp", [&](const std::string& k, const std::string& v) { cfg.payoff_amp = parse_number(v, k); }},
        {"payoff_width", [&](const std::string& k, const std::string& v) { cfg.payoff_width = parse_number(v, k); }},
        {"payoff_floor", [&](const std::string& k, const std::string& v) { cfg.payoff_floor = parse_number(v, k); }},
        {"payoff_radius", [&](const std::string& k, const std::string& v) { cfg.payoff_radius = parse_number(v, k); }},
        {"payoff_smoothing", [&](const std::string& k, const std::string& v) { cfg.payoff_smoothing = parse_number(v, k); }},
        {"payoff_value", [&](const std::string& k, const std::string& v) { cfg.payoff_value = parse_number(v, k); }},
        {"payoff_center", [&](const std::string& k, const std::string& v) { cfg.payoff_center = parse_vector(v, k); }},
        {"lipschitz_g", [&](const std::string& k, const std::string& v) { cfg.lipschitz_g = parse_number(v, k); }},
        {"operator", [&](const std::string&, const std::string& v) { cfg.op = v; }},
        {"m", [&](const std::string& k, const std::string& v) { cfg.m = parse_number(v, k); }},
        {"directions", [&](const std::string& k, const std::string& v) { cfg.directions = static_cast<int>(parse_number(v, k)); }},
        {"grad_epsilon", [&](const std::string& k, const std::string& v) { cfg.grad_epsilon = parse_number(v, k); }},
        {"boundary", [&](const std::string&, const std::string& v) { cfg.boundary = v; }},
        {"cfl_safety", [&](const std::string& k, const std::string& v) { cfg.cfl_safety = parse_number(v, k); }},
        {"max_stored_levels", [&](const std::string& k, const std::string& v) { cfg.max_stored_levels = static_cast<int>(parse_number(v, k)); }},
        {"barrier_eps", [&](const std::string& k, const std::string& v) { cfg.barrier_eps = parse_number(v, k); }},
        {"master_seed", [&](const std::string& k, const std::string& v) { cfg.master_seed = static_cast<std::uint64_t>(parse_number(v, k)); }},
        {"n_paths", [&](const std::string& k, const std::string& v) { cfg.n_paths = static_cast<std::int64_t>(parse_number(v, k)); }},
        {"dt_sim", [&](const std::string& k, const std::string& v) { cfg.dt_sim = parse_number(v, k); }},
        {"epoch_steps", [&](const std::string& k, const std::string& v) { cfg.epoch_steps = static_cast<int>(parse_number(v, k)); }},
        {"anchor1", [&](const std::string& k, const std::string& v) { cfg.anchor1 = parse_vector(v, k); }},
        {"anchor2", [&](const std::string& k, const std::string& v) { cfg.anchor2 = parse_vector(v, k); }},
        {"anchor3", [&](const std::string& k, const std::string& v) { cfg.anchor3 = parse_vector(v, k); }},
    };

    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": unknown key '" + key + "'");
        it->second(key, value);
    }

    if (cfg.mu.size() != cfg.n)
        throw ConfigError("config: mu must have n components");
    if (cfg.payoff_center.size() != cfg.n)
        throw ConfigError("config: payoff_center must have n components");
    return cfg;
}

InstanceConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

ProblemSpec make_problem_spec(const InstanceConfig& cfg) {
    ProblemSpec spec;
    spec.n = cfg.n;
    spec.T = cfg.T;
    spec.mu = cfg.mu;
    spec.r = cfg.r;
    spec.lipschitz_g = cfg.lipschitz_g;
    if (cfg.p_field == "constant")
        spec.p_field = constant_exponent(cfg.p0);
    else if (cfg.p_field == "sinusoidal")
        spec.p_field = sinusoidal_exponent(cfg.p_base, cfg.p_amp);
    else
        throw ConfigError("config: unknown p_field '" + cfg.p_field + "'");
    if (cfg.payoff == "gaussian_bump")
        spec.payoff = gaussian_bump_payoff(cfg.payoff_amp, cfg.payoff_width,
                                           cfg.payoff_center, cfg.payoff_floor);
    else if (cfg.payoff == "smoothed_cone")
        spec.payoff = smoothed_cone_payoff(cfg.payoff_amp, cfg.payoff_radius,
                                           cfg.payoff_smoothing, cfg.payoff_center,
                                           cfg.payoff_floor);
    else if (cfg.payoff == "constant")
        spec.payoff = constant_payoff(cfg.payoff_value, cfg.n);
    else
        throw ConfigError("config: unknown payoff '" + cfg.payoff + "'");
    return spec;
}

SolverConfig make_solver_config(const InstanceConfig& cfg) {
    SolverConfig sc;
    if (cfg.op == "lower_m")
        sc.operator_choice = OperatorChoice::lower_m;
    else if (cfg.op == "upper_m")
        sc.operator_choice = OperatorChoice::upper_m;
    else if (cfg.op == "limit")
        sc.operator_choice = OperatorChoice::limit;
    else
        throw ConfigError("config: unknown operator '" + cfg.op + "'");
    sc.m = cfg.m;
    sc.directions = cfg.directions;
    sc.grad_epsilon = cfg.grad_epsilon;
    if (cfg.boundary == "clamp_to_g")
        sc.boundary = BoundaryPolicy::clamp_to_g;
    else if (cfg.boundary == "barrier_box")
        sc.boundary = BoundaryPolicy::barrier_box;
    else
        throw ConfigError("config: unknown boundary '" + cfg.boundary + "'");
    sc.cfl_safety = cfg.cfl_safety;
    sc.max_stored_levels = cfg.max_stored_levels;
    sc.barrier_eps = cfg.barrier_eps;
    return sc;
}

SpaceTimeGrid make_grid(const InstanceConfig& cfg) {
    const ProblemSpec spec = make_problem_spec(cfg);
    const SolverConfig sc = make_solver_config(cfg);
    const double bound = stable_dt(spec, cfg.h, sc);
    const double dt = cfg.dt > 0.0 ? cfg.dt : bound;
    return SpaceTimeGrid::make(cfg.n, cfg.R, cfg.h, cfg.T, dt);
}

std::map<std::string, std::string> config_echo(const InstanceConfig& cfg) {
    std::map<std::string, std::string> e;
    e["n"] = std::to_string(cfg.n);
    e["T"] = format_double(cfg.T);
    e["R"] = format_double(cfg.R);
    e["h"] = format_double(cfg.h);
    e["dt"] = format_double(cfg.dt);
    e["mu"] = vector_to_string(cfg.mu);
    e["r"] = format_double(cfg.r);
    e["p_field"] = cfg.p_field;
    e["p0"] = format_double(cfg.p0);
    e["p_base"] = format_double(cfg.p_base);
    e["p_amp"] = format_double(cfg.p_amp);
    e["payoff"] = cfg.payoff;
    e["payoff_amp"] = format_double(cfg.payoff_amp);
    e["payoff_width"] = format_double(cfg.payoff_width);
    e["payoff_floor"] = format_double(cfg.payoff_floor);
    e["payoff_radius"] = format_double(cfg.payoff_radius);
    e["payoff_smoothing"] = format_double(cfg.payoff_smoothing);
    e["payoff_value"] = format_double(cfg.payoff_value);
    e["payoff_center"] = vector_to_string(cfg.payoff_center);
    e["lipschitz_g"] = format_double(cfg.lipschitz_g);
    e["operator"] = cfg.op;
    e["m"] = format_double(cfg.m);
    e["directions"] = std::to_string(cfg.directions);
    e["grad_epsilon"] = format_double(cfg.grad_epsilon);
    e["boundary"] = cfg.boundary;
    e["cfl_safety"] = format_double(cfg.cfl_safety);
    e["max_stored_levels"] = std::to_string(cfg.max_stored_levels);
    e["barrier_eps"] = format_double(cfg.barrier_eps);
    e["master_seed"] = std::to_string(cfg.master_seed);
    e["n_paths"] = std::to_string(cfg.n_paths);
    e["dt_sim"] = format_double(cfg.dt_sim);
    e["epoch_steps"] = std::to_string(cfg.epoch_steps);
    e["anchor1"] = vector_to_string(cfg.anchor1);
    e["anchor2"] = vector_to_string(cfg.anchor2);
    e["anchor3"] = vector_to_string(cfg.anchor3);
    return e;
}

const char* schema_text() {
    return R"(# Configuration schema: one "key = value" per line, '#' comments.
# Vectors are comma-separated with n components.
#
# instance
#   n                integer state dimension (>= 2)
#   T                horizon (> 0)
#   R                spatial truncation half-width (box [-R, R]^n)
#   h                spatial grid spacing
#   dt               time step; 0 selects the stability bound automatically
#   mu               drift vector (n components)
#   r                discount rate (>= 0)
#   p_field          exponent field: constant | sinusoidal
#   p0               value for p_field = constant (> 1)
#   p_base, p_amp    p = p_base + p_amp sin(x1) cos(t) for sinusoidal
#   payoff           gaussian_bump | smoothed_cone | constant
#   payoff_amp, payoff_width, payoff_floor, payoff_center   gaussian_bump
#   payoff_radius, payoff_smoothing                          smoothed_cone
#   payoff_value                                             constant
#   lipschitz_g      bound on both sup g and the Lipschitz seminorm of g
# solver
#   operator         lower_m | upper_m | limit
#   m                intensity bound for the bounded operators
#   directions       direction-grid resolution (even, >= 4)
#   grad_epsilon     |Du| <= grad_epsilon * h switches the limit operator
#                    to the envelope midpoint
#   boundary         clamp_to_g | barrier_box
#   cfl_safety       fraction of the stability bound, in (0, 1)
#   max_stored_levels  stack thinning cap (0 = store all levels)
#   barrier_eps      epsilon for barrier_box Dirichlet data
# simulation
#   master_seed      64-bit seed for the counter-based noise streams
#   n_paths          Monte Carlo sample size
#   dt_sim           Euler-Maruyama step
#   epoch_steps      integration steps per control decision epoch
#   anchor1..anchor3 evaluation points (n components each)
)";
}

} // namespace towlab
