#pragma once

#include "towlab/core/fields.hpp"

#include <Eigen/Core>
#include <string>
#include <vector>

namespace towlab {

/// One full problem instance of the terminal value game:
/// state dimension n >= 2, horizon T, drift mu, discount r >= 0,
/// exponent field p and payoff g with joint bound lipschitz_g
/// (lipschitz_g bounds both sup g and the Lipschitz seminorm of g).
struct ProblemSpec {
    int n = 2;
    double T = 1.0;
    Eigen::VectorXd mu;
    double r = 0.0;
    ExponentField p_field;
    PayoffField payoff;
    double lipschitz_g = 1.0;
};

/// Probe-based validation. Returns an empty list iff every invariant
/// holds on a deterministic sample of points; each entry names the
/// violated invariant. Violations are data, not exceptions.
std::vector<std::string> validate_spec(const ProblemSpec& spec);

} // namespace towlab
