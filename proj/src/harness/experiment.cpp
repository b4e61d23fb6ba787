#include "towlab/harness/experiment.hpp"

#include "towlab/analysis/barrier.hpp"
#include "towlab/analysis/convolution.hpp"
#include "towlab/core/errors.hpp"
#include "towlab/core/io.hpp"
#include "towlab/game/policy.hpp"
#include "towlab/game/sim.hpp"
#include "towlab/harness/oracle.hpp"
#include "towlab/operators/operators.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <memory>
#include <sstream>

namespace towlab {
namespace {

class Splitmix {
public:
    explicit Splitmix(std::uint64_t seed) : state_(seed ? seed : 1) {}
    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

Metric metric(std::string name, double value, double tolerance,
              std::string provenance) {
    Metric m;
    m.name = std::move(name);
    m.value = value;
    m.tolerance = tolerance;
    m.pass = value <= tolerance;
    m.provenance = std::move(provenance);
    return m;
}

Eigen::VectorXd random_unit(Splitmix& rng, int n) {
    Eigen::VectorXd v(n);
    for (;;) {
        for (int k = 0; k < n; ++k) v[k] = rng.uniform(-1.0, 1.0);
        const double norm = v.norm();
        if (norm > 1e-3) return v / norm;
    }
}

Eigen::MatrixXd random_symmetric(Splitmix& rng, int n, double spectral_cap) {
    Eigen::MatrixXd s(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double v = rng.uniform(-1.0, 1.0);
            s(i, j) = v;
            s(j, i) = v;
        }
    const double norm = s.operatorNorm();
    if (norm > 0.0) s *= spectral_cap / norm;
    return s;
}

std::shared_ptr<const SolutionStack> solve_shared(const ProblemSpec& spec,
                                                  const SpaceTimeGrid& grid,
                                                  const SolverConfig& sc) {
    return std::make_shared<const SolutionStack>(solve(spec, grid, sc));
}

SpaceTimeGrid auto_grid(const ProblemSpec& spec, double R, double h,
                        const SolverConfig& sc, double dt_request) {
    const double bound = stable_dt(spec, h, sc);
    const double dt = dt_request > 0.0 ? dt_request : bound;
    return SpaceTimeGrid::make(spec.n, R, h, spec.T, dt);
}

// ------------------------------------------------------------------ heat

ExperimentReport heat_check(const InstanceConfig& cfg_in) {
    InstanceConfig cfg = cfg_in;
    cfg.p_field = "constant";
    cfg.p0 = 2.0;
    cfg.mu = Eigen::VectorXd::Zero(cfg.n);
    cfg.r = 0.0;
    cfg.payoff = "gaussian_bump";
    cfg.op = "limit";

    ExperimentReport rep;
    rep.name = "heat_check";
    rep.config = cfg;

    const ProblemSpec spec = make_problem_spec(cfg);
    SolverConfig sc = make_solver_config(cfg);
    const SpaceTimeGrid grid = auto_grid(spec, cfg.R, cfg.h, sc, cfg.dt);
    const SolutionStack stack = solve(spec, grid, sc);

    // Sup error against the quadrature oracle on the half-radius subgrid.
    const GridFunction& u0 = stack.initial();
    double sup_err = 0.0;
    std::ostringstream tab;
    tab << "# heat_check: solution at t = 0 vs gaussian-convolution oracle\n";
    tab << "# columns: x1,x2,u,oracle,abs_err\n";
    const double half = grid.half_width() / 2.0;
    for (std::int64_t i = 0; i < grid.total_nodes(); ++i) {
        const Eigen::VectorXd x = grid.node_coord(i);
        if (x.lpNorm<Eigen::Infinity>() > half + 1e-12) continue;
        const double oracle = heat_convolution_quadrature(spec.payoff, x, spec.T);
        const double err = std::abs(u0.values[i] - oracle);
        sup_err = std::max(sup_err, err);
        if (grid.dim() == 2)
            tab << format_double(x[0]) << ',' << format_double(x[1]) << ','
                << format_double(u0.values[i]) << ',' << format_double(oracle)
                << ',' << format_double(err) << '\n';
    }
    rep.metrics.push_back(metric("heat_sup_error_half_grid", sup_err, 2e-2,
                                 "oracle:gaussian-convolution-quadrature"));
    rep.tables.push_back({"heat_values.csv", tab.str()});

    // Simulator against the same oracle: pure diffusion from the bump center.
    {
        const Policy zero = Policy::zero_intensity(spec.n);
        const Eigen::VectorXd x0 = cfg.payoff_center;
        const std::int64_t paths = std::min<std::int64_t>(cfg.n_paths, 4000);
        const MonteCarloResult mc =
            monte_carlo_value(zero, zero, x0, 0.0, paths, cfg.dt_sim,
                              cfg.epoch_steps, cfg.master_seed, spec);
        const double oracle = heat_convolution_quadrature(spec.payoff, x0, spec.T);
        rep.metrics.push_back(metric(
            "heat_mc_error", std::abs(mc.mean - oracle),
            3.0 * mc.stderr_of_mean + 2e-3,
            "oracle:gaussian-convolution-quadrature"));
    }

    // Sensitivity of the vanishing-gradient switch.
    {
        SolverConfig sc2 = sc;
        sc2.grad_epsilon = sc.grad_epsilon * 1e3;
        const SolutionStack stack2 = solve(spec, grid, sc2);
        double diff = 0.0;
        for (std::int64_t i = 0; i < grid.total_nodes(); ++i)
            diff = std::max(diff, std::abs(stack.initial().values[i] -
                                           stack2.initial().values[i]));
        rep.metrics.push_back(metric("heat_grad_epsilon_sensitivity", diff, 1e-2,
                                     "self:grad-epsilon-sweep"));
    }
    return rep;
}

// -------------------------------------------------------- operator limit

ExperimentReport operator_limit(const InstanceConfig& cfg) {
    ExperimentReport rep;
    rep.name = "operator_limit";
    rep.config = cfg;
    const ProblemSpec spec = make_problem_spec(cfg);
    const int n = spec.n;
    const std::vector<double> ms = {10.0, 100.0, 1000.0, 10000.0};
    const int inputs = 20;

    Splitmix rng(cfg.master_seed ^ 0x11d7);
    std::ostringstream tab;
    tab << "# operator_limit: |F_m^- + F| per input and intensity bound\n";
    tab << "# columns: input,m,discrepancy\n";
    double worst_increase = -1e300;
    double worst_final = 0.0;
    for (int i = 0; i < inputs; ++i) {
        Eigen::VectorXd x(n);
        for (int k = 0; k < n; ++k) x[k] = rng.uniform(-2.0, 2.0);
        const double t = rng.uniform(0.0, spec.T);
        SecondOrderData data;
        data.xi = rng.uniform(0.0, spec.lipschitz_g);
        data.nu = random_unit(rng, n) * rng.uniform(0.5, 2.0);
        data.hessian = random_symmetric(rng, n, 0.8);
        const double limit = f_limit(x, t, data, spec);
        // Direction-grid error envelope: a competitor at angular gap
        // delta from the canonical optimizer gains at most
        // C delta - m |nu| delta^2 / 2 with C = |p-2| ||M||, whose
        // maximum over delta is C^2 / (2 m |nu|). The discrepancy is
        // nonincreasing only up to wobble at this scale (the signed
        // error can cross zero), so each step gets that much slack.
        const double c_env = std::abs(spec.p_field.evaluate(x, t) - 2.0) *
                             data.hessian.operatorNorm();
        const double nu_norm = data.nu.norm();
        double prev = 0.0;
        for (size_t k = 0; k < ms.size(); ++k) {
            const ActionGrid grid = ActionGrid::make(n, 256, ms[k]);
            const double disc = std::abs(isaacs_lower(grid, x, t, data, spec) + limit);
            tab << i << ',' << format_double(ms[k]) << ',' << format_double(disc)
                << '\n';
            if (k > 0) {
                const double slack = c_env * c_env / (ms[k] * nu_norm) + 1e-9;
                worst_increase = std::max(worst_increase, disc - prev - slack);
            }
            if (k + 1 == ms.size()) worst_final = std::max(worst_final, disc);
            prev = disc;
        }
    }
    rep.metrics.push_back(metric("operator_limit_max_increase_beyond_grid_error",
                                 worst_increase, 0.0, "property:monotone-in-m"));
    rep.metrics.push_back(metric("operator_limit_final_discrepancy", worst_final,
                                 1e-3, "oracle:limit-operator-formula"));
    rep.tables.push_back({"operator_limit.csv", tab.str()});
    return rep;
}

// ------------------------------------------------------------ value match

ExperimentReport value_match(const InstanceConfig& cfg_in) {
    InstanceConfig cfg = cfg_in;
    cfg.op = "lower_m";
    ExperimentReport rep;
    rep.name = "value_match";
    rep.config = cfg;

    const ProblemSpec spec = make_problem_spec(cfg);
    SolverConfig sc = make_solver_config(cfg);
    const SpaceTimeGrid grid = auto_grid(spec, cfg.R, cfg.h, sc, cfg.dt);
    auto stack = solve_shared(spec, grid, sc);
    const Policy pmin = Policy::greedy(stack, PlayerRole::minimizer);
    const Policy pmax = Policy::best_response(stack);

    std::ostringstream tab;
    tab << "# value_match: Monte Carlo game value vs PDE solve at t = 0\n";
    tab << "# columns: anchor,mc_mean,mc_stderr,pde_value,abs_diff\n";
    const std::vector<Eigen::VectorXd> anchors = {cfg.anchor1, cfg.anchor2,
                                                  cfg.anchor3};
    for (size_t k = 0; k < anchors.size(); ++k) {
        const MonteCarloResult mc = monte_carlo_value(
            pmin, pmax, anchors[k], 0.0, cfg.n_paths, cfg.dt_sim,
            cfg.epoch_steps, cfg.master_seed + k, spec);
        const double pde_value = interpolate(stack->initial(), anchors[k]);
        const double diff = std::abs(mc.mean - pde_value);
        tab << (k + 1) << ',' << format_double(mc.mean) << ','
            << format_double(mc.stderr_of_mean) << ',' << format_double(pde_value)
            << ',' << format_double(diff) << '\n';
        rep.metrics.push_back(metric(
            "value_match_anchor" + std::to_string(k + 1), diff,
            3.0 * mc.stderr_of_mean + 5e-2, "oracle:pde-lower-solve"));
    }
    rep.tables.push_back({"value_match.csv", tab.str()});
    return rep;
}

// ---------------------------------------------------------- barrier check

ExperimentReport barrier_check(const InstanceConfig& cfg_in) {
    InstanceConfig cfg = cfg_in;
    cfg.op = "lower_m";
    ExperimentReport rep;
    rep.name = "barrier_check";
    rep.config = cfg;

    const ProblemSpec spec = make_problem_spec(cfg);
    SolverConfig sc = make_solver_config(cfg);
    const SpaceTimeGrid grid = auto_grid(spec, cfg.R, cfg.h, sc, cfg.dt);
    const SolutionStack stack = solve(spec, grid, sc);

    Splitmix rng(cfg.master_seed ^ 0xbab1);
    const double eps01 = 0.5;
    const double tol_res = grid.spacing() * barrier_rate(spec);

    double upper_res_max = -1e300;
    double lower_res_min = 1e300;
    int bracket_violations = 0;
    for (int anchor = 0; anchor < 3; ++anchor) {
        Eigen::VectorXd y(spec.n);
        for (int k = 0; k < spec.n; ++k) y[k] = rng.uniform(-1.0, 1.0);

        // The barriers split into a node part and a time-linear part.
        const double g_y = spec.payoff.evaluate(y);
        const double rate = barrier_rate(spec) / std::sqrt(eps01);
        std::vector<double> slack(grid.total_nodes());
        for (std::int64_t i = 0; i < grid.total_nodes(); ++i) {
            const Eigen::VectorXd x = grid.node_coord(i);
            slack[i] = 2.0 * spec.lipschitz_g *
                       std::sqrt((x - y).squaredNorm() + eps01);
        }
        SolutionStack up = stack, lo = stack;
        for (size_t l = 0; l < stack.levels.size(); ++l) {
            const double tau = spec.T - stack.levels[l].time;
            for (std::int64_t i = 0; i < grid.total_nodes(); ++i) {
                const double b_up = g_y + rate * tau + slack[i];
                const double b_lo = g_y - rate * tau - slack[i];
                up.levels[l].values[i] = b_up;
                lo.levels[l].values[i] = b_lo;
                if (b_up < stack.levels[l].values[i] - 1e-9) ++bracket_violations;
                if (b_lo > stack.levels[l].values[i] + 1e-9) ++bracket_violations;
            }
        }
        const int stored = static_cast<int>(stack.levels.size());
        for (int s = 0; s < 334; ++s) {
            std::int64_t node =
                static_cast<std::int64_t>(rng.next_u64() %
                                          static_cast<std::uint64_t>(grid.total_nodes()));
            if (!grid.is_interior(node, 1)) continue;
            const int lvl = 1 + static_cast<int>(rng.next_u64() % (stored - 1));
            upper_res_max = std::max(upper_res_max, residual(up, node, lvl));
            lower_res_min = std::min(lower_res_min, residual(lo, node, lvl));
        }
    }
    rep.metrics.push_back(metric("barrier_upper_residual_max", upper_res_max,
                                 tol_res, "oracle:discrete-residual"));
    rep.metrics.push_back(metric("barrier_lower_residual_sign", -lower_res_min,
                                 tol_res, "oracle:discrete-residual"));
    rep.metrics.push_back(metric("barrier_bracket_violations",
                                 static_cast<double>(bracket_violations), 0.0,
                                 "property:comparison-ordering"));

    int terminal_violations = 0;
    for (int s = 0; s < 1000; ++s) {
        Eigen::VectorXd x(spec.n), y(spec.n);
        for (int k = 0; k < spec.n; ++k) {
            x[k] = rng.uniform(-grid.half_width(), grid.half_width());
            y[k] = rng.uniform(-grid.half_width(), grid.half_width());
        }
        if (barrier_upper(y, eps01, x, spec.T, spec) < spec.payoff.evaluate(x))
            ++terminal_violations;
        if (barrier_lower(y, eps01, x, spec.T, spec) > spec.payoff.evaluate(x))
            ++terminal_violations;
    }
    rep.metrics.push_back(metric("barrier_terminal_violations",
                                 static_cast<double>(terminal_violations), 0.0,
                                 "property:lipschitz-terminal-ordering"));
    return rep;
}

// ------------------------------------------------------- comparison check

ExperimentReport comparison_check(const InstanceConfig& cfg) {
    ExperimentReport rep;
    rep.name = "comparison_check";
    rep.config = cfg;

    const ProblemSpec base = make_problem_spec(cfg);
    SolverConfig sc = make_solver_config(cfg);

    auto count_violations = [&](const ProblemSpec& s1, const ProblemSpec& s2,
                                OperatorChoice op) {
        SolverConfig c = sc;
        c.operator_choice = op;
        const double bound1 = stable_dt(s1, cfg.h, c);
        SpaceTimeGrid grid = SpaceTimeGrid::make(cfg.n, cfg.R, cfg.h, cfg.T, bound1);
        const SolutionStack u1 = solve(s1, grid, c);
        const SolutionStack u2 = solve(s2, grid, c);
        int violations = 0;
        for (size_t l = 0; l < u1.levels.size(); ++l)
            for (std::int64_t i = 0; i < grid.total_nodes(); ++i)
                if (u1.levels[l].values[i] > u2.levels[l].values[i]) ++violations;
        return violations;
    };

    // Offset pair g and g + 0.1 across all three operators.
    {
        InstanceConfig c2 = cfg;
        c2.payoff_floor = cfg.payoff_floor + 0.1;
        const ProblemSpec shifted = make_problem_spec(c2);
        int total = 0;
        for (OperatorChoice op : {OperatorChoice::lower_m, OperatorChoice::upper_m,
                                  OperatorChoice::limit})
            total += count_violations(base, shifted, op);
        rep.metrics.push_back(metric("comparison_violations_offset_pair",
                                     static_cast<double>(total), 0.0,
                                     "property:comparison-ordering"));
    }
    // Amplitude-ordered bumps, limit operator.
    {
        InstanceConfig c2 = cfg;
        c2.payoff_amp = cfg.payoff_amp + 0.1;
        rep.metrics.push_back(metric(
            "comparison_violations_amplitude_pair",
            static_cast<double>(count_violations(base, make_problem_spec(c2),
                                                 OperatorChoice::limit)),
            0.0, "property:comparison-ordering"));
    }
    // Bump below a dominating constant, limit operator.
    {
        InstanceConfig c2 = cfg;
        c2.payoff = "constant";
        c2.payoff_value = cfg.payoff_floor + cfg.payoff_amp + 0.05;
        rep.metrics.push_back(metric(
            "comparison_violations_constant_pair",
            static_cast<double>(count_violations(base, make_problem_spec(c2),
                                                 OperatorChoice::limit)),
            0.0, "property:comparison-ordering"));
    }
    return rep;
}

// ------------------------------------------------------ convolution check

ExperimentReport convolution_check(const InstanceConfig& cfg) {
    ExperimentReport rep;
    rep.name = "convolution_check";
    rep.config = cfg;
    Splitmix rng(cfg.master_seed ^ 0xc0de);

    auto random_stack = [&](double R, double h, int levels) {
        auto grid =
            std::make_shared<SpaceTimeGrid>(SpaceTimeGrid(2, R, h, 0.03, levels));
        std::vector<GridFunction> stack(levels);
        for (int l = 0; l < levels; ++l) {
            stack[l].grid = grid;
            stack[l].time = grid->time_of_level(l);
            stack[l].values.resize(grid->total_nodes());
            for (auto& v : stack[l].values) v = rng.uniform();
        }
        return stack;
    };

    auto max_diff = [](const std::vector<GridFunction>& a,
                       const std::vector<GridFunction>& b) {
        double d = 0.0;
        for (size_t l = 0; l < a.size(); ++l)
            for (size_t i = 0; i < a[l].values.size(); ++i)
                d = std::max(d, std::abs(a[l].values[i] - b[l].values[i]));
        return d;
    };

    // Fast separable transform against the O(N^2) oracle at three sizes,
    // the largest around 40^3 nodes, both directions.
    double worst = 0.0;
    struct Size { double R, h; int levels; };
    for (const Size& s : {Size{1.0, 0.25, 7}, Size{1.0, 0.1, 11}, Size{1.0, 0.05, 38}}) {
        const auto stack = random_stack(s.R, s.h, s.levels);
        for (auto dir : {ConvolutionParams::Direction::sup,
                         ConvolutionParams::Direction::inf}) {
            const ConvolutionParams params{0.07, dir};
            worst = std::max(worst, max_diff(quad_convolution(stack, params),
                                             quad_convolution_brute(stack, params)));
        }
    }
    rep.metrics.push_back(metric("convolution_vs_brute_max_diff", worst, 1e-12,
                                 "oracle:brute-force-envelope"));

    // Ordering, eps-monotonicity, repeat-convolution and semiconvexity on
    // a mid-size stack.
    const auto stack = random_stack(1.0, 0.1, 9);
    const auto sup1 = quad_convolution(stack, {0.1, ConvolutionParams::Direction::sup});
    const auto sup2 = quad_convolution(stack, {0.05, ConvolutionParams::Direction::sup});
    const auto sup3 = quad_convolution(stack, {0.025, ConvolutionParams::Direction::sup});
    const auto inf1 = quad_convolution(stack, {0.1, ConvolutionParams::Direction::inf});
    double order_violation = 0.0;
    double eps_violation = 0.0;
    for (size_t l = 0; l < stack.size(); ++l)
        for (size_t i = 0; i < stack[l].values.size(); ++i) {
            order_violation = std::max(order_violation,
                                       stack[l].values[i] - sup1[l].values[i]);
            order_violation = std::max(order_violation,
                                       inf1[l].values[i] - stack[l].values[i]);
            eps_violation = std::max(eps_violation,
                                     sup2[l].values[i] - sup1[l].values[i]);
            eps_violation = std::max(eps_violation,
                                     sup3[l].values[i] - sup2[l].values[i]);
        }
    rep.metrics.push_back(metric("convolution_order_violation", order_violation,
                                 1e-12, "property:envelope-ordering"));
    rep.metrics.push_back(metric("convolution_eps_monotonicity_violation",
                                 eps_violation, 1e-12,
                                 "property:eps-monotonicity"));

    const auto twice = quad_convolution(sup1, {0.05, ConvolutionParams::Direction::sup});
    double repeat_violation = 0.0;
    for (size_t l = 0; l < stack.size(); ++l)
        for (size_t i = 0; i < stack[l].values.size(); ++i)
            repeat_violation = std::max(repeat_violation,
                                        sup1[l].values[i] - twice[l].values[i]);
    rep.metrics.push_back(metric("convolution_repeat_violation", repeat_violation,
                                 1e-12, "property:envelope-ordering"));

    // Discrete semiconvexity along every x-line: second differences of
    // w + |x|^2/(2 eps) are nonnegative.
    double semiconvexity = -1e300;
    {
        const SpaceTimeGrid& grid = *stack.front().grid;
        const double eps = 0.1;
        const int N = grid.axis_nodes();
        for (size_t l = 0; l < sup1.size(); ++l)
            for (int axis = 0; axis < 2; ++axis) {
                const std::int64_t stride = grid.stride(axis);
                for (std::int64_t start = 0; start < grid.total_nodes(); ++start) {
                    const int coord = static_cast<int>((start / stride) % N);
                    if (coord < 1 || coord > N - 2) continue;
                    const double x0 = grid.axis_coord(coord - 1);
                    const double x1 = grid.axis_coord(coord);
                    const double x2 = grid.axis_coord(coord + 1);
                    const double v0 = sup1[l].values[start - stride] + x0 * x0 / (2 * eps);
                    const double v1 = sup1[l].values[start] + x1 * x1 / (2 * eps);
                    const double v2 = sup1[l].values[start + stride] + x2 * x2 / (2 * eps);
                    semiconvexity = std::max(semiconvexity, 2 * v1 - v0 - v2);
                }
            }
    }
    rep.metrics.push_back(metric("convolution_semiconvexity_violation",
                                 semiconvexity, 1e-9,
                                 "property:semiconvexity"));
    return rep;
}

// -------------------------------------------------------- m convergence

ExperimentReport m_convergence(const InstanceConfig& cfg_in) {
    InstanceConfig cfg = cfg_in;
    cfg.R = std::min(cfg.R, 3.0);
    cfg.h = std::max(cfg.h, 0.1);
    cfg.op = "lower_m";
    ExperimentReport rep;
    rep.name = "m_convergence";
    rep.config = cfg;

    const ProblemSpec spec = make_problem_spec(cfg);
    const std::vector<double> ms = {5.0, 10.0, 20.0, 40.0};
    std::vector<SolutionStack> stacks;
    for (double m : ms) {
        SolverConfig sc = make_solver_config(cfg);
        sc.m = m;
        stacks.push_back(solve(spec, auto_grid(spec, cfg.R, cfg.h, sc, 0.0), sc));
    }
    const SpaceTimeGrid& grid = *stacks[0].grid;
    auto initial_distance = [&](const SolutionStack& a, const SolutionStack& b) {
        double d = 0.0;
        for (std::int64_t i = 0; i < grid.total_nodes(); ++i) {
            const Eigen::VectorXd x = grid.node_coord(i);
            if (x.lpNorm<Eigen::Infinity>() > 1.5) continue;
            d = std::max(d, std::abs(a.initial().values[i] - b.initial().values[i]));
        }
        return d;
    };
    std::vector<double> dists;
    for (size_t k = 0; k + 1 < stacks.size(); ++k)
        dists.push_back(initial_distance(stacks[k], stacks[k + 1]));

    std::ostringstream tab;
    tab << "# m_convergence: sup distance between lower_m solves at m and 2m\n";
    tab << "# columns: m,distance_to_2m,holder_quotient_at_m\n";
    for (size_t k = 0; k < ms.size(); ++k) {
        tab << format_double(ms[k]) << ','
            << (k < dists.size() ? format_double(dists[k]) : "")
            << ','
            << format_double(holder_quotient(stacks[k], 1.5, 2000,
                                             cfg.master_seed ^ 0xa0))
            << '\n';
    }
    rep.tables.push_back({"m_convergence.csv", tab.str()});

    double worst_increase = -1e300;
    for (size_t k = 0; k + 1 < dists.size(); ++k)
        worst_increase = std::max(worst_increase, dists[k + 1] - dists[k]);
    rep.metrics.push_back(metric("m_convergence_max_increase", worst_increase,
                                 0.0, "property:cauchy-in-m"));
    return rep;
}

// -------------------------------------------------- boundary sensitivity

ExperimentReport boundary_sensitivity(const InstanceConfig& cfg_in) {
    InstanceConfig cfg = cfg_in;
    cfg.op = "limit";
    cfg.max_stored_levels = 17;
    ExperimentReport rep;
    rep.name = "boundary_sensitivity";
    rep.config = cfg;

    const ProblemSpec spec = make_problem_spec(cfg);
    SolverConfig sc = make_solver_config(cfg);
    const SolutionStack small = solve(spec, auto_grid(spec, cfg.R, cfg.h, sc, 0.0), sc);
    const SolutionStack big =
        solve(spec, auto_grid(spec, 2.0 * cfg.R, cfg.h, sc, 0.0), sc);

    const SpaceTimeGrid& gs = *small.grid;
    const GridFunction& big0 = big.initial();
    double diff = 0.0;
    for (std::int64_t i = 0; i < gs.total_nodes(); ++i) {
        const Eigen::VectorXd x = gs.node_coord(i);
        if (x.lpNorm<Eigen::Infinity>() > gs.half_width() / 2.0 + 1e-12) continue;
        diff = std::max(diff, std::abs(small.initial().values[i] - interpolate(big0, x)));
    }
    rep.metrics.push_back(
        metric("boundary_sensitivity_half_grid", diff, 1e-2, "self:R-doubling"));
    return rep;
}

} // namespace

bool ExperimentReport::all_pass() const {
    for (const auto& m : metrics)
        if (!m.pass) return false;
    return true;
}

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "heat_check",     "operator_limit",    "value_match",
        "barrier_check",  "comparison_check",  "convolution_check",
        "m_convergence",  "boundary_sensitivity"};
    return names;
}

ExperimentReport run_experiment(const std::string& name,
                                const InstanceConfig& config) {
    using Runner = std::function<ExperimentReport(const InstanceConfig&)>;
    static const std::map<std::string, Runner> runners = {
        {"heat_check", heat_check},
        {"operator_limit", operator_limit},
        {"value_match", value_match},
        {"barrier_check", barrier_check},
        {"comparison_check", comparison_check},
        {"convolution_check", convolution_check},
        {"m_convergence", m_convergence},
        {"boundary_sensitivity", boundary_sensitivity}};
    const auto it = runners.find(name);
    if (it == runners.end())
        throw ConfigError("unknown experiment '" + name + "'");
    return it->second(config);
}

std::vector<std::string> emit_tables(const ExperimentReport& report,
                                     const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::vector<std::string> manifest;

    if (!report.metrics.empty()) {
        std::ostringstream csv;
        csv << "# " << report.name
            << " metrics; pass means value <= tolerance\n";
        csv << "# columns: metric,value,tolerance,pass,provenance\n";
        for (const auto& m : report.metrics)
            csv << m.name << ',' << format_double(m.value) << ','
                << format_double(m.tolerance) << ',' << (m.pass ? 1 : 0) << ','
                << m.provenance << '\n';
        const std::string path =
            (fs::path(out_dir) / (report.name + "_metrics.csv")).string();
        write_text_file(path, csv.str());
        manifest.push_back(path);
    }
    for (const auto& t : report.tables) {
        const std::string path = (fs::path(out_dir) / t.filename).string();
        write_text_file(path, t.csv);
        manifest.push_back(path);
    }

    nlohmann::json side;
    side["experiment"] = report.name;
    side["seed"] = report.config.master_seed;
    nlohmann::json cfg_json;
    for (const auto& [k, v] : config_echo(report.config)) cfg_json[k] = v;
    side["config"] = cfg_json;
    nlohmann::json metrics_json = nlohmann::json::array();
    for (const auto& m : report.metrics) {
        nlohmann::json mj;
        mj["name"] = m.name;
        mj["value"] = m.value;
        mj["tolerance"] = m.tolerance;
        mj["pass"] = m.pass;
        mj["provenance"] = m.provenance;
        metrics_json.push_back(mj);
    }
    side["metrics"] = metrics_json;
    side["files"] = manifest;
    const std::string spath =
        (fs::path(out_dir) / (report.name + "_sidecar.json")).string();
    write_text_file(spath, side.dump(2) + "\n");
    manifest.push_back(spath);
    return manifest;
}

} // namespace towlab
