#include "towlab/pde/solver.hpp"

#include "towlab/core/errors.hpp"
#include "towlab/core/io.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

namespace towlab {
namespace {

constexpr double kPExponentLagTol = 1e-4; // max drift of cached p values

struct InteriorIterator {
    // Odometer over interior multi-indices (margin 1), last axis innermost.
    const SpaceTimeGrid& grid;
    std::vector<int> multi;
    bool done = false;

    explicit InteriorIterator(const SpaceTimeGrid& g)
        : grid(g), multi(g.dim(), 1) {}

    std::int64_t flat() const { return grid.flatten(multi.data()); }

    void advance_row() {
        // Bump all axes except the innermost one.
        for (int k = grid.dim() - 2; k >= 0; --k) {
            if (++multi[k] <= grid.axis_nodes() - 2) return;
            multi[k] = 1;
        }
        done = true;
    }
};

double s2_mass(const ProblemSpec& spec) {
    double worst = 0.0;
    for (double p : {spec.p_field.p_min, spec.p_field.p_max}) {
        const double v = 2.0 * (spec.n + p - 2.0) + std::abs(p - 2.0) * (spec.n - 1);
        worst = std::max(worst, v);
    }
    return worst;
}

// Midpoint of the semicontinuous envelopes at a vanishing gradient:
// tr M - r xi + (p-2)(lambda_min + lambda_max)/2. In 2-D the extreme
// eigenvalues sum to the trace.
double envelope_midpoint(double p_val, const double* m_upper, double tr_m,
                         double r, double xi, int n) {
    double sum_extremes;
    if (n == 2) {
        sum_extremes = tr_m;
    } else {
        Eigen::MatrixXd M(n, n);
        int idx = 0;
        for (int k = 0; k < n; ++k)
            for (int l = k; l < n; ++l) {
                M(k, l) = m_upper[idx];
                M(l, k) = m_upper[idx];
                ++idx;
            }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);
        sum_extremes = eig.eigenvalues().minCoeff() + eig.eigenvalues().maxCoeff();
    }
    return tr_m - r * xi + 0.5 * (p_val - 2.0) * sum_extremes;
}

} // namespace

const char* to_string(OperatorChoice c) {
    switch (c) {
    case OperatorChoice::lower_m: return "lower_m";
    case OperatorChoice::upper_m: return "upper_m";
    case OperatorChoice::limit: return "limit";
    }
    return "?";
}

const char* to_string(BoundaryPolicy b) {
    return b == BoundaryPolicy::clamp_to_g ? "clamp_to_g" : "barrier_box";
}

double stable_dt(const ProblemSpec& spec, double h, const SolverConfig& config) {
    if (!(config.cfl_safety > 0.0 && config.cfl_safety < 1.0))
        throw ConfigError("cfl_safety must lie in (0, 1)");
    const double m_eff =
        config.operator_choice == OperatorChoice::limit ? 0.0 : config.m;
    const double drift = 4.0 * std::sqrt(static_cast<double>(spec.n)) * m_eff +
                         spec.mu.lpNorm<1>();
    const double denom = s2_mass(spec) / (h * h) + drift / h + spec.r;
    return config.cfl_safety / denom;
}

const GridFunction& SolutionStack::level_at(double t) const {
    // Stored times decrease from T to 0; nearest wins.
    int lo = 0, hi = static_cast<int>(levels.size()) - 1;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (levels[mid].time >= t)
            lo = mid;
        else
            hi = mid;
    }
    return std::abs(levels[lo].time - t) <= std::abs(levels[hi].time - t)
               ? levels[lo]
               : levels[hi];
}

SolutionStack solve(const ProblemSpec& spec, const SpaceTimeGrid& grid,
                    const SolverConfig& config) {
    {
        const auto violations = validate_spec(spec);
        if (!violations.empty()) {
            std::string msg = "solve: invalid problem spec:";
            for (const auto& v : violations) msg += " [" + v + "]";
            throw ConfigError(msg);
        }
    }
    if (grid.dim() != spec.n) throw ConfigError("solve: grid dimension mismatch");
    if (std::abs(grid.horizon() - spec.T) > 1e-9 * std::max(1.0, spec.T))
        throw ConfigError("solve: grid horizon does not match spec.T");
    const double bound = stable_dt(spec, grid.spacing(), config);
    if (grid.dt() > bound * (1.0 + 1e-12))
        throw ConfigError("solve: CFL violation, dt=" + format_double(grid.dt()) +
                          " exceeds stability bound " + format_double(bound));
    if (!(config.grad_epsilon > 0.0))
        throw ConfigError("solve: grad_epsilon must be positive");

    const int n = grid.dim();
    const int N = grid.axis_nodes();
    const double h = grid.spacing();
    const double dt = grid.dt();
    const int n_t = grid.n_t();
    const std::int64_t total = grid.total_nodes();
    const bool bounded = config.operator_choice != OperatorChoice::limit;
    const bool lower = config.operator_choice == OperatorChoice::lower_m;
    const double inv_h2 = 1.0 / (h * h);
    const double inv_2h = 0.5 / h;
    const double inv_4h2 = 0.25 * inv_h2;
    const double grad_threshold = config.grad_epsilon * h;

    ActionGrid actions = bounded ? ActionGrid::make(n, config.directions, config.m)
                                 : ActionGrid::make(n, 4, 1.0); // unused for limit

    // Node coordinates (reused by every field evaluation below).
    std::vector<Eigen::VectorXd> coords(total);
    for (std::int64_t i = 0; i < total; ++i) coords[i] = grid.node_coord(i);

    // Terminal data and boundary shell.
    std::vector<double> g_values(total);
    for (std::int64_t i = 0; i < total; ++i)
        g_values[i] = spec.payoff.evaluate(coords[i]);
    std::vector<std::int64_t> boundary;
    for (std::int64_t i = 0; i < total; ++i)
        if (!grid.is_interior(i, 1)) boundary.push_back(i);

    // barrier_box Dirichlet base: midpoint of the upper/lower barrier
    // envelopes over a coarse anchor lattice (the time-linear terms of
    // the two barriers cancel in the midpoint), clamped to [0, sup g].
    std::vector<double> barrier_mid;
    if (config.boundary == BoundaryPolicy::barrier_box) {
        std::vector<std::int64_t> anchors;
        const int stride = std::max(1, N / 8);
        for (std::int64_t i = 0; i < total; ++i) {
            bool on_lattice = true;
            std::int64_t rest = i;
            for (int k = 0; k < n; ++k) {
                const int ik = static_cast<int>(rest / grid.stride(k));
                rest %= grid.stride(k);
                if (ik % stride != 0) { on_lattice = false; break; }
            }
            if (on_lattice) anchors.push_back(i);
        }
        const double eps = config.barrier_eps;
        const double two_lg = 2.0 * spec.lipschitz_g;
        barrier_mid.resize(boundary.size());
        for (size_t bi = 0; bi < boundary.size(); ++bi) {
            const Eigen::VectorXd& x = coords[boundary[bi]];
            double up = std::numeric_limits<double>::infinity();
            double lo = -up;
            for (std::int64_t a : anchors) {
                const double d = std::sqrt((x - coords[a]).squaredNorm() + eps);
                up = std::min(up, g_values[a] + two_lg * d);
                lo = std::max(lo, g_values[a] - two_lg * d);
            }
            barrier_mid[bi] =
                std::min(std::max(0.5 * (up + lo), 0.0), spec.payoff.sup_bound);
        }
    }

    // Exponent cache, refreshed so the in-flight lag stays below tolerance.
    std::vector<double> p_cache(total);
    int p_refresh = n_t;
    if (spec.p_field.lipschitz_p > 0.0)
        p_refresh = std::max(
            1, static_cast<int>(kPExponentLagTol / (spec.p_field.lipschitz_p * dt)));
    auto fill_p = [&](double t) {
        for (std::int64_t i = 0; i < total; ++i)
            p_cache[i] = spec.p_field.evaluate(coords[i], t);
    };

    // Stored-level thinning.
    int keep = 1;
    if (config.max_stored_levels > 0 && n_t > config.max_stored_levels)
        keep = (n_t + config.max_stored_levels - 1) / config.max_stored_levels;

    SolutionStack stack;
    stack.grid = std::make_shared<SpaceTimeGrid>(grid);
    stack.spec = spec;
    stack.config = config;
    stack.keep_every = keep;
    stack.achieved_cfl = grid.dt() / bound;

    std::vector<double> cur = g_values;
    std::vector<double> nxt(total);
    auto store = [&](int level, const std::vector<double>& vals) {
        GridFunction f;
        f.grid = stack.grid;
        f.time = grid.time_of_level(level);
        f.values = vals;
        stack.levels.push_back(std::move(f));
    };
    store(0, cur);
    stack.global_min = *std::min_element(cur.begin(), cur.end());
    stack.global_max = *std::max_element(cur.begin(), cur.end());

    std::vector<std::int64_t> cross_off;
    std::vector<std::pair<int, int>> cross_axes;
    for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
            cross_axes.emplace_back(k, l);
            cross_off.push_back(grid.stride(k) + grid.stride(l));
        }

    double packed[36];
    double nu[8];
    fill_p(grid.time_of_level(0));

    for (int level = 0; level + 1 < n_t; ++level) {
        const double t = grid.time_of_level(level);
        const double t_next = grid.time_of_level(level + 1);
        if (level % p_refresh == 0 && level > 0) fill_p(t);

        double level_sum = 0.0;
        double lvl_min = std::numeric_limits<double>::infinity();
        double lvl_max = -lvl_min;

        for (InteriorIterator it(grid); !it.done; it.advance_row()) {
            const std::int64_t row0 = it.flat();
            const std::int64_t inner = grid.stride(n - 1); // == 1
            for (int j = 1; j <= N - 2; ++j) {
                const std::int64_t idx = row0 + (j - 1) * inner;
                // idx for multi with last coord = j: row0 has last coord 1.
                const double u0 = cur[idx];
                double tr_m = 0.0;
                double nn2 = 0.0;
                int pk = 0;
                for (int k = 0; k < n; ++k) {
                    const std::int64_t s = grid.stride(k);
                    const double up = cur[idx + s];
                    const double dn = cur[idx - s];
                    nu[k] = (up - dn) * inv_2h;
                    nn2 += nu[k] * nu[k];
                    const double mkk = (up - 2.0 * u0 + dn) * inv_h2;
                    tr_m += mkk;
                    packed[pk] = mkk;
                    pk += n - k; // move to next diagonal slot
                }
                // Cross entries into packed upper-triangle layout.
                {
                    int ci = 0;
                    for (int k = 0; k < n; ++k)
                        for (int l = k + 1; l < n; ++l) {
                            const std::int64_t sk = grid.stride(k);
                            const std::int64_t sl = grid.stride(l);
                            const double m_kl =
                                (cur[idx + sk + sl] + cur[idx - sk - sl] -
                                 cur[idx + sk - sl] - cur[idx - sk + sl]) *
                                inv_4h2;
                            // packed slot for (k,l): offset within row
                            int slot = 0;
                            for (int kk = 0; kk < k; ++kk) slot += n - kk;
                            slot += l - k;
                            packed[slot] = m_kl;
                            ++ci;
                        }
                    (void)ci;
                }
                const double p_val = p_cache[idx];
                double mu_nu = 0.0;
                for (int k = 0; k < n; ++k) mu_nu += spec.mu[k] * nu[k];

                double new_val;
                if (bounded) {
                    const double game =
                        lower ? isaacs_lower_game(actions, p_val, nu, packed)
                              : isaacs_upper_game(actions, p_val, nu, packed);
                    const double op = game - tr_m - mu_nu + spec.r * u0;
                    new_val = u0 - dt * op;
                } else {
                    double op;
                    if (nn2 > grad_threshold * grad_threshold) {
                        // (p-2) <M nu, nu>/|nu|^2 via the packed entries.
                        double quad = 0.0;
                        int qi = 0;
                        for (int k = 0; k < n; ++k)
                            for (int l = k; l < n; ++l) {
                                const double w =
                                    (k == l) ? nu[k] * nu[k] : 2.0 * nu[k] * nu[l];
                                quad += w * packed[qi++];
                            }
                        op = (p_val - 2.0) * quad / nn2 + tr_m + mu_nu -
                             spec.r * u0;
                    } else {
                        op = envelope_midpoint(p_val, packed, tr_m, spec.r, u0, n);
                    }
                    new_val = u0 + dt * op;
                }
                nxt[idx] = new_val;
                level_sum += new_val;
                lvl_min = std::min(lvl_min, new_val);
                lvl_max = std::max(lvl_max, new_val);
            }
        }

        // Lateral boundary shell at the new time.
        const double tau = spec.T - t_next;
        if (config.boundary == BoundaryPolicy::clamp_to_g) {
            const double decay = std::exp(-spec.r * tau);
            for (std::int64_t b : boundary) {
                const double v = g_values[b] * decay;
                nxt[b] = v;
                level_sum += v;
                lvl_min = std::min(lvl_min, v);
                lvl_max = std::max(lvl_max, v);
            }
        } else {
            for (size_t bi = 0; bi < boundary.size(); ++bi) {
                const double v = barrier_mid[bi];
                nxt[boundary[bi]] = v;
                level_sum += v;
                lvl_min = std::min(lvl_min, v);
                lvl_max = std::max(lvl_max, v);
            }
        }

        if (!std::isfinite(level_sum))
            throw DivergenceError("solve: non-finite values at time level " +
                                  std::to_string(level + 1) + " (t=" +
                                  format_double(t_next) + ")");
        stack.global_min = std::min(stack.global_min, lvl_min);
        stack.global_max = std::max(stack.global_max, lvl_max);

        cur.swap(nxt);
        const int new_level = level + 1;
        if (new_level % keep == 0 || new_level == n_t - 1) store(new_level, cur);
    }
    return stack;
}

SecondOrderData discrete_derivatives(const GridFunction& level, std::int64_t node) {
    const SpaceTimeGrid& grid = *level.grid;
    if (!grid.is_interior(node, 1))
        throw std::domain_error("discrete_derivatives: node within one-node margin");
    const int n = grid.dim();
    const double h = grid.spacing();
    SecondOrderData d;
    d.xi = level.values[node];
    d.nu = Eigen::VectorXd(n);
    d.hessian = Eigen::MatrixXd(n, n);
    for (int k = 0; k < n; ++k) {
        const std::int64_t s = grid.stride(k);
        const double up = level.values[node + s];
        const double dn = level.values[node - s];
        d.nu[k] = (up - dn) / (2.0 * h);
        d.hessian(k, k) = (up - 2.0 * d.xi + dn) / (h * h);
    }
    for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
            const std::int64_t sk = grid.stride(k);
            const std::int64_t sl = grid.stride(l);
            const double v = (level.values[node + sk + sl] + level.values[node - sk - sl] -
                              level.values[node + sk - sl] - level.values[node - sk + sl]) /
                             (4.0 * h * h);
            d.hessian(k, l) = v;
            d.hessian(l, k) = v;
        }
    return d;
}

double residual(const SolutionStack& stack, std::int64_t node, int stored_level) {
    if (stored_level < 1 || stored_level >= static_cast<int>(stack.levels.size()))
        throw std::domain_error("residual: level must have a later stored neighbor");
    const GridFunction& later = stack.levels[stored_level - 1];
    const GridFunction& earlier = stack.levels[stored_level];
    const double dtau = later.time - earlier.time;
    const SecondOrderData d = discrete_derivatives(later, node);
    const Eigen::VectorXd x = stack.grid->node_coord(node);
    const double dudt = (later.values[node] - earlier.values[node]) / dtau;

    switch (stack.config.operator_choice) {
    case OperatorChoice::lower_m: {
        ActionGrid actions = ActionGrid::make(stack.spec.n, stack.config.directions,
                                              stack.config.m);
        return dudt - isaacs_lower(actions, x, later.time, d, stack.spec);
    }
    case OperatorChoice::upper_m: {
        ActionGrid actions = ActionGrid::make(stack.spec.n, stack.config.directions,
                                              stack.config.m);
        return dudt - isaacs_upper(actions, x, later.time, d, stack.spec);
    }
    case OperatorChoice::limit: {
        const double h = stack.grid->spacing();
        double op;
        if (d.nu.norm() > stack.config.grad_epsilon * h) {
            op = f_limit(x, later.time, d, stack.spec);
        } else {
            SecondOrderData dz = d;
            dz.nu.setZero();
            const auto env = f_envelopes(x, later.time, dz, stack.spec);
            op = 0.5 * (env.first + env.second);
        }
        return dudt + op;
    }
    }
    throw std::logic_error("unreachable operator choice");
}

std::vector<std::string> export_stack(const SolutionStack& stack,
                                      const std::string& out_dir,
                                      const std::string& tag, int level_stride) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    if (level_stride < 1) level_stride = 1;
    std::vector<std::string> files;
    const SpaceTimeGrid& grid = *stack.grid;
    const int n = grid.dim();

    const int count = static_cast<int>(stack.levels.size());
    for (int li = 0; li < count; li += level_stride) {
        const GridFunction& f = stack.levels[li];
        std::ostringstream csv;
        csv << "# " << tag << " solution values at t = " << format_double(f.time)
            << "\n# columns: x1";
        for (int k = 1; k < n; ++k) csv << ",x" << (k + 1);
        csv << ",u\n";
        for (std::int64_t i = 0; i < grid.total_nodes(); ++i) {
            const Eigen::VectorXd x = grid.node_coord(i);
            for (int k = 0; k < n; ++k) csv << format_double(x[k]) << ',';
            csv << format_double(f.values[i]) << '\n';
        }
        char name[64];
        std::snprintf(name, sizeof(name), "%s_level_%04d.csv", tag.c_str(), li);
        const std::string path = (fs::path(out_dir) / name).string();
        write_text_file(path, csv.str());
        files.push_back(path);
    }

    // Coarse residual statistics on a deterministic interior sample.
    double max_abs_residual = 0.0;
    if (stack.levels.size() >= 2) {
        std::uint64_t state = 0x5EEDBA5Eull;
        auto next_u64 = [&state]() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            return state;
        };
        const int samples = 256;
        for (int s = 0; s < samples; ++s) {
            const std::int64_t node = static_cast<std::int64_t>(
                next_u64() % static_cast<std::uint64_t>(grid.total_nodes()));
            const int lvl = 1 + static_cast<int>(next_u64() %
                                                 (stack.levels.size() - 1));
            if (!grid.is_interior(node, 1)) continue;
            max_abs_residual =
                std::max(max_abs_residual, std::abs(residual(stack, node, lvl)));
        }
    }

    nlohmann::json side;
    side["tag"] = tag;
    side["operator"] = to_string(stack.config.operator_choice);
    side["boundary"] = to_string(stack.config.boundary);
    side["m"] = stack.config.m;
    side["directions"] = stack.config.directions;
    side["grad_epsilon"] = stack.config.grad_epsilon;
    side["cfl_safety"] = stack.config.cfl_safety;
    side["achieved_cfl"] = stack.achieved_cfl;
    side["keep_every"] = stack.keep_every;
    side["dt"] = grid.dt();
    side["n_t"] = grid.n_t();
    side["h"] = grid.spacing();
    side["half_width"] = grid.half_width();
    side["n"] = n;
    side["T"] = stack.spec.T;
    side["r"] = stack.spec.r;
    side["lipschitz_g"] = stack.spec.lipschitz_g;
    side["p_field"] = stack.spec.p_field.name;
    side["payoff"] = stack.spec.payoff.name;
    side["global_min"] = stack.global_min;
    side["global_max"] = stack.global_max;
    side["max_abs_residual_sampled"] = max_abs_residual;
    side["stored_levels"] = count;
    side["files"] = files;
    const std::string spath =
        (fs::path(out_dir) / (tag + "_sidecar.json")).string();
    write_text_file(spath, side.dump(2) + "\n");
    files.push_back(spath);
    return files;
}

} // namespace towlab
