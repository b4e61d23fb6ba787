#pragma once

#include "towlab/core/problem.hpp"

#include <Eigen/Core>

namespace towlab {

/// Explicit supersolution anchored at y:
///   g(y) + A eps^{-1/2} (T - t) + 2 L_g (|x-y|^2 + eps)^{1/2}
/// with A = 4 L_g (n Lambda + |mu|), Lambda = max(1, p_max - 1).
/// Requires eps01 in (0, 1).
double barrier_upper(const Eigen::VectorXd& y, double eps01,
                     const Eigen::VectorXd& x, double t,
                     const ProblemSpec& spec);

/// Matching subsolution: g(y) - A eps^{-1/2}(T - t) - 2 L_g (...)^{1/2}.
double barrier_lower(const Eigen::VectorXd& y, double eps01,
                     const Eigen::VectorXd& x, double t,
                     const ProblemSpec& spec);

/// The coefficient A = 4 L_g (n Lambda + |mu|) used by both barriers.
double barrier_rate(const ProblemSpec& spec);

/// Space-infinity / initial-time barrier delta (|x|^2 + |y|^2) + gamma / t.
/// Requires t > 0 and delta, gamma >= 0.
double doubling_barrier(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                        double t, double delta, double gamma);

} // namespace towlab
