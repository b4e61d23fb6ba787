#pragma once

#include "towlab/core/grid.hpp"
#include "towlab/core/problem.hpp"
#include "towlab/operators/operators.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace towlab {

enum class OperatorChoice { lower_m, upper_m, limit };
enum class BoundaryPolicy { clamp_to_g, barrier_box };

const char* to_string(OperatorChoice c);
const char* to_string(BoundaryPolicy b);

struct SolverConfig {
    OperatorChoice operator_choice = OperatorChoice::lower_m;
    double m = 10.0;           // intensity bound for the bounded operators
    int directions = 16;       // direction-grid resolution
    double grad_epsilon = 1e-6; // |Du| <= grad_epsilon * h switches to envelopes
    BoundaryPolicy boundary = BoundaryPolicy::clamp_to_g;
    double cfl_safety = 0.9;   // fraction of the stability bound, in (0, 1)
    double barrier_eps = 0.25; // epsilon for barrier_box Dirichlet data
    // Stacks larger than this keep every k-th level (terminal and final
    // levels always kept); 0 keeps everything.
    int max_stored_levels = 1025;
};

/// Explicit time-step stability bound derived from the stencil weights:
/// every frozen-control update must be non-expansive in sup norm, which
/// needs dt * (S2 / h^2 + drift_mass / h + r) <= 1 where
///   S2 = max_{p in {p_min, p_max}} [2(n + p - 2) + |p - 2| (n - 1)]
/// bounds the absolute second-order stencil mass (diagonal plus cross
/// terms of A_{a,b}) and drift_mass = 4 sqrt(n) m + |mu|_1 bounds the
/// summed first-order coefficients ((c+d)|a+b| <= 4m componentwise).
/// The limit operator takes m = 0. Returns cfl_safety times the bound.
double stable_dt(const ProblemSpec& spec, double h, const SolverConfig& config);

struct SolutionStack {
    std::shared_ptr<const SpaceTimeGrid> grid;
    ProblemSpec spec;
    SolverConfig config;
    std::vector<GridFunction> levels; // levels.front() at t = T, back at t = 0
    int keep_every = 1;               // stored-level thinning factor
    double achieved_cfl = 0.0;        // dt / stability bound
    double global_min = 0.0;          // over every computed level, stored or not
    double global_max = 0.0;

    double dt() const { return grid->dt(); }
    int n_t() const { return grid->n_t(); }
    /// Stored level nearest to time t.
    const GridFunction& level_at(double t) const;
    const GridFunction& terminal() const { return levels.front(); }
    const GridFunction& initial() const { return levels.back(); }
};

/// March the terminal value problem backwards from t = T to t = 0 with
/// the explicit monotone scheme:
///   bounded ops:  u(t - dt) = u(t) - dt * F_m(x, t, u, Du, D2u)
///   limit op:     u(t - dt) = u(t) + dt * F(x, t, u, Du, D2u)
/// Derivatives are central; at nodes with |Du| <= grad_epsilon * h the
/// limit operator uses the midpoint of the semicontinuous envelopes.
/// The lateral boundary shell follows config.boundary. Throws
/// ConfigError if grid.dt() violates the stability bound, and
/// DivergenceError (naming the level) if a non-finite value appears.
SolutionStack solve(const ProblemSpec& spec, const SpaceTimeGrid& grid,
                    const SolverConfig& config);

/// Central first differences and the standard second-order Hessian
/// stencil (including cross terms) at an interior node. Throws
/// std::domain_error at boundary nodes.
SecondOrderData discrete_derivatives(const GridFunction& level, std::int64_t node);

/// Discrete equation residual at an interior node of an interior stored
/// level: backward time difference against the stored level one step
/// later in time, operator evaluated at the later level. Zero to
/// round-off on an unthinned computed stack. Used by verification only.
double residual(const SolutionStack& stack, std::int64_t node, int stored_level);

/// Write one CSV per selected stored level (coordinates and values,
/// documented header) plus a JSON metadata sidecar. Returns the list of
/// files written. level_stride selects every k-th stored level.
std::vector<std::string> export_stack(const SolutionStack& stack,
                                      const std::string& out_dir,
                                      const std::string& tag,
                                      int level_stride);

} // namespace towlab
