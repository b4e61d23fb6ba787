#pragma once

#include "towlab/core/problem.hpp"
#include "towlab/game/noise.hpp"
#include "towlab/game/policy.hpp"
#include "towlab/operators/action.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

namespace towlab {

/// Orthonormal basis of the hyperplane orthogonal to a unit vector nu,
/// returned as the n x (n-1) matrix of basis columns. Built from the
/// reflection carrying e1 to nu (branch point at nu = -e1, where a fixed
/// coordinate complement is returned); P P^T = I - nu nu^T.
Eigen::MatrixXd orthogonal_complement_basis(const Eigen::VectorXd& nu);

/// Joint control G = (a, b, c, d) of the two players.
struct JointControl {
    Eigen::VectorXd a;
    Eigen::VectorXd b;
    double c = 0.0;
    double d = 0.0;
};

/// One Euler-Maruyama step of the state dynamics:
/// x' = x + [mu + (c+d)(a+b)] dt + sigma(x, G) sqrt(dt) z,
/// with z a 2n standard normal vector and sigma evaluated at p(x, t).
Eigen::VectorXd em_step(const Eigen::VectorXd& x, double t,
                        const JointControl& g, double dt,
                        std::span<const double> z, const ProblemSpec& spec);

/// Discrete-time sample path with realized controls and the discounted
/// terminal payoff e^{-r(T - t0)} g(X(T)).
struct Trajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    std::vector<JointControl> controls; // per step (held between epochs)
    double payoff = 0.0;
};

/// Run the game from (x0, t0) to T with step dt. Controls are refreshed
/// every epoch_steps integration steps and held in between; at each
/// epoch the maximizer responds after seeing the minimizer's control.
/// dt must divide T - t0. Throws DivergenceError on a non-finite state.
Trajectory simulate(const Policy& policy_min, const Policy& policy_max,
                    const Eigen::VectorXd& x0, double t0, double dt,
                    int epoch_steps, NormalStream& noise,
                    const ProblemSpec& spec, bool record_path = true);

struct MonteCarloResult {
    double mean = 0.0;
    double stderr_of_mean = 0.0;
    std::int64_t n_paths = 0;
    std::uint64_t master_seed = 0;
};

/// Sample mean and standard error of the discounted payoff over
/// independent paths. Deterministic given master_seed: path i draws from
/// NormalStream(master_seed, i) and the reduction runs in index order.
MonteCarloResult monte_carlo_value(const Policy& policy_min,
                                   const Policy& policy_max,
                                   const Eigen::VectorXd& x0, double t0,
                                   std::int64_t n_paths, double dt,
                                   int epoch_steps, std::uint64_t master_seed,
                                   const ProblemSpec& spec);

} // namespace towlab
