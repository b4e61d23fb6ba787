#pragma once

#include "towlab/core/problem.hpp"
#include "towlab/pde/solver.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace towlab {

/// Flat key = value configuration (see schema_text() for the documented
/// schema). Vectors are comma-separated; '#' starts a comment.
struct InstanceConfig {
    // instance
    int n = 2;
    double T = 1.0;
    double R = 4.0;
    double h = 0.05;
    double dt = 0.0; // 0 = choose automatically from the stability bound
    Eigen::VectorXd mu = (Eigen::VectorXd(2) << 0.1, 0.0).finished();
    double r = 0.05;
    std::string p_field = "sinusoidal"; // constant | sinusoidal
    double p0 = 2.0;                    // constant exponent value
    double p_base = 3.0;                // sinusoidal parameters
    double p_amp = 0.5;
    std::string payoff = "gaussian_bump"; // gaussian_bump | smoothed_cone | constant
    double payoff_amp = 0.70;
    double payoff_width = 1.0;
    double payoff_floor = 0.05;
    double payoff_radius = 1.5;    // smoothed_cone
    double payoff_smoothing = 0.1; // smoothed_cone
    double payoff_value = 0.5;     // constant payoff
    Eigen::VectorXd payoff_center = Eigen::VectorXd::Zero(2);
    double lipschitz_g = 1.0;
    // solver
    std::string op = "lower_m"; // lower_m | upper_m | limit
    double m = 10.0;
    int directions = 16;
    double grad_epsilon = 1e-6;
    std::string boundary = "clamp_to_g"; // clamp_to_g | barrier_box
    double cfl_safety = 0.9;
    int max_stored_levels = 1025;
    double barrier_eps = 0.25;
    // simulation
    std::uint64_t master_seed = 20240809;
    std::int64_t n_paths = 10000;
    double dt_sim = 1e-3;
    int epoch_steps = 10;
    Eigen::VectorXd anchor1 = (Eigen::VectorXd(2) << 0.5, 0.25).finished();
    Eigen::VectorXd anchor2 = (Eigen::VectorXd(2) << -0.75, 0.5).finished();
    Eigen::VectorXd anchor3 = (Eigen::VectorXd(2) << 0.25, -1.0).finished();
};

InstanceConfig parse_config_file(const std::string& path);
InstanceConfig parse_config_text(const std::string& text);

ProblemSpec make_problem_spec(const InstanceConfig& cfg);
SolverConfig make_solver_config(const InstanceConfig& cfg);
/// Grid honoring cfg.dt if positive (validated later against the bound),
/// else the stability bound of make_solver_config(cfg).
SpaceTimeGrid make_grid(const InstanceConfig& cfg);

/// Canonical sorted key = value echo of a config (used by sidecars and
/// the determinism checks).
std::map<std::string, std::string> config_echo(const InstanceConfig& cfg);

/// Human-readable schema documentation.
const char* schema_text();

} // namespace towlab
