// Command line front end: validate configs, run solves and simulations,
// and execute the verification experiments.
//
// Exit codes: 0 all metrics pass, 1 metric or runtime failure,
// 2 configuration error.

#include "towlab/core/errors.hpp"
#include "towlab/core/io.hpp"
#include "towlab/game/policy.hpp"
#include "towlab/game/sim.hpp"
#include "towlab/harness/config.hpp"
#include "towlab/harness/experiment.hpp"
#include "towlab/pde/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>

namespace {

std::string pick_out_dir(const std::string& flag_value) {
    // The environment variable overrides the flag, which overrides ./out.
    if (const char* env = std::getenv("TOWLAB_OUT")) return env;
    if (!flag_value.empty()) return flag_value;
    return "out";
}

int print_metrics(const towlab::ExperimentReport& report) {
    for (const auto& m : report.metrics)
        std::cout << (m.pass ? "[PASS] " : "[FAIL] ") << report.name << "/"
                  << m.name << ": value=" << towlab::format_double(m.value)
                  << " tolerance=" << towlab::format_double(m.tolerance) << " ("
                  << m.provenance << ")\n";
    return report.all_pass() ? 0 : 1;
}

int cmd_validate(const std::string& config_path) {
    const auto cfg = towlab::parse_config_file(config_path);
    const auto spec = towlab::make_problem_spec(cfg);
    const auto violations = towlab::validate_spec(spec);
    if (violations.empty()) {
        std::cout << "config and problem spec valid\n";
        return 0;
    }
    for (const auto& v : violations) std::cout << "violation: " << v << "\n";
    return 1;
}

int cmd_solve(const std::string& config_path, const std::string& out_flag) {
    const auto cfg = towlab::parse_config_file(config_path);
    const auto spec = towlab::make_problem_spec(cfg);
    const auto sc = towlab::make_solver_config(cfg);
    const auto grid = towlab::make_grid(cfg);
    const auto stack = towlab::solve(spec, grid, sc);
    const std::string out = pick_out_dir(out_flag);
    const int stride =
        std::max(1, static_cast<int>(stack.levels.size()) / 8);
    const auto files = towlab::export_stack(stack, out, "solve", stride);
    std::cout << "solved " << grid.n_t() << " levels (dt="
              << towlab::format_double(grid.dt())
              << ", achieved_cfl=" << towlab::format_double(stack.achieved_cfl)
              << "); wrote " << files.size() << " files to " << out << "\n";
    return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_flag,
                 bool trajectories) {
    const auto cfg = towlab::parse_config_file(config_path);
    auto cfg_lower = cfg;
    cfg_lower.op = "lower_m";
    const auto spec = towlab::make_problem_spec(cfg_lower);
    const auto sc = towlab::make_solver_config(cfg_lower);
    const auto grid = towlab::make_grid(cfg_lower);
    auto stack = std::make_shared<const towlab::SolutionStack>(
        towlab::solve(spec, grid, sc));
    const auto pmin = towlab::Policy::greedy(stack, towlab::PlayerRole::minimizer);
    const auto pmax = towlab::Policy::best_response(stack);
    const auto mc = towlab::monte_carlo_value(pmin, pmax, cfg.anchor1, 0.0,
                                              cfg.n_paths, cfg.dt_sim,
                                              cfg.epoch_steps, cfg.master_seed,
                                              spec);
    const std::string out = pick_out_dir(out_flag);
    std::filesystem::create_directories(out);

    nlohmann::json summary;
    summary["mean"] = mc.mean;
    summary["stderr"] = mc.stderr_of_mean;
    summary["n_paths"] = mc.n_paths;
    summary["seed"] = mc.master_seed;
    summary["anchor"] = std::vector<double>(cfg.anchor1.data(),
                                            cfg.anchor1.data() + cfg.anchor1.size());
    summary["pde_value_at_anchor"] = towlab::interpolate(stack->initial(), cfg.anchor1);
    towlab::write_text_file(out + "/mc_summary.json", summary.dump(2) + "\n");

    if (trajectories) {
        towlab::NormalStream stream(cfg.master_seed, 0);
        const auto traj = towlab::simulate(pmin, pmax, cfg.anchor1, 0.0,
                                           cfg.dt_sim, cfg.epoch_steps, stream,
                                           spec, true);
        std::ostringstream csv;
        csv << "# sample path 0\n# columns: t";
        for (int k = 0; k < spec.n; ++k) csv << ",x" << (k + 1);
        csv << ",a1..an,c,b1..bn,d\n";
        for (size_t i = 0; i < traj.controls.size(); ++i) {
            csv << towlab::format_double(traj.times[i]);
            for (int k = 0; k < spec.n; ++k)
                csv << ',' << towlab::format_double(traj.states[i][k]);
            const auto& g = traj.controls[i];
            for (int k = 0; k < spec.n; ++k)
                csv << ',' << towlab::format_double(g.a[k]);
            csv << ',' << towlab::format_double(g.c);
            for (int k = 0; k < spec.n; ++k)
                csv << ',' << towlab::format_double(g.b[k]);
            csv << ',' << towlab::format_double(g.d) << '\n';
        }
        towlab::write_text_file(out + "/trajectory_path0.csv", csv.str());
    }
    std::cout << "mc value = " << towlab::format_double(mc.mean) << " +- "
              << towlab::format_double(mc.stderr_of_mean) << " (" << mc.n_paths
              << " paths); summary in " << out << "\n";
    return 0;
}

int cmd_verify(const std::string& experiment, const std::string& config_path,
               const std::string& out_flag) {
    const auto cfg = towlab::parse_config_file(config_path);
    const auto report = towlab::run_experiment(experiment, cfg);
    towlab::emit_tables(report, pick_out_dir(out_flag));
    return print_metrics(report);
}

int cmd_sweep(const std::string& config_path, const std::string& out_flag) {
    const auto cfg = towlab::parse_config_file(config_path);
    int rc = 0;
    for (const auto& name : towlab::experiment_names()) {
        const auto report = towlab::run_experiment(name, cfg);
        towlab::emit_tables(report, pick_out_dir(out_flag));
        rc |= print_metrics(report);
    }
    return rc;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tug-of-war game / parabolic p(x,t)-Laplace laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir, experiment;
    bool trajectories = false;

    auto* validate = app.add_subcommand("validate", "validate a config file");
    validate->add_option("config", config_path)->required();

    auto* solve = app.add_subcommand("solve", "solve the terminal value problem");
    solve->add_option("config", config_path)->required();
    solve->add_option("--out", out_dir, "output directory");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo game value");
    simulate->add_option("config", config_path)->required();
    simulate->add_option("--out", out_dir, "output directory");
    simulate->add_flag("--trajectories", trajectories, "export a sample path CSV");

    auto* verify = app.add_subcommand("verify", "run one verification experiment");
    verify->add_option("experiment", experiment)->required();
    verify->add_option("config", config_path)->required();
    verify->add_option("--out", out_dir, "output directory");

    auto* sweep = app.add_subcommand("sweep", "run every experiment");
    sweep->add_option("config", config_path)->required();
    sweep->add_option("--out", out_dir, "output directory");

    auto* schema = app.add_subcommand("schema", "print the config schema");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(config_path);
        if (solve->parsed()) return cmd_solve(config_path, out_dir);
        if (simulate->parsed()) return cmd_simulate(config_path, out_dir, trajectories);
        if (verify->parsed()) return cmd_verify(experiment, config_path, out_dir);
        if (sweep->parsed()) return cmd_sweep(config_path, out_dir);
        if (schema->parsed()) {
            std::cout << towlab::schema_text();
            return 0;
        }
    } catch (const towlab::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
