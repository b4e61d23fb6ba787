#pragma once

#include <Eigen/Core>
#include <functional>
#include <map>
#include <string>

namespace towlab {

/// Variable exponent p(x,t). The callable must stay inside
/// [p_min, p_max] with 1 < p_min <= p_max < inf, and be Lipschitz with
/// constant lipschitz_p in the parabolic metric (|x-y|^2 + (t-s)^2)^{1/2}.
/// Declared bounds are checked by probe, not symbolically.
struct ExponentField {
    std::function<double(const Eigen::VectorXd&, double)> evaluate;
    double p_min = 2.0;
    double p_max = 2.0;
    double lipschitz_p = 0.0;
    std::string name = "custom";
    std::map<std::string, double> params;
};

/// Terminal payoff g(x): strictly positive, bounded and Lipschitz.
/// Both sup g and the Lipschitz seminorm must be <= the owning
/// ProblemSpec's lipschitz_g.
struct PayoffField {
    std::function<double(const Eigen::VectorXd&)> evaluate;
    double sup_bound = 0.0;       // declared sup g
    double lipschitz_bound = 0.0; // declared Lipschitz seminorm
    std::string name = "custom";
    std::map<std::string, double> params;
    Eigen::VectorXd center; // empty if not applicable
};

// Built-in exponent fields.
ExponentField constant_exponent(double p0);
// p(x,t) = base + amp * sin(x_1) * cos(t), values in [base-amp, base+amp].
ExponentField sinusoidal_exponent(double base, double amp);

// Built-in payoffs. All are strictly positive, bounded, Lipschitz.
// gaussian bump: floor + amp * exp(-|x-center|^2 / (2 width^2))
PayoffField gaussian_bump_payoff(double amp, double width,
                                 const Eigen::VectorXd& center,
                                 double floor_value = 0.0);
// smoothed cone: floor + amp * max(0, 1 - sqrt(|x-center|^2 + smoothing^2)/radius)
PayoffField smoothed_cone_payoff(double amp, double radius, double smoothing,
                                 const Eigen::VectorXd& center,
                                 double floor_value);
PayoffField constant_payoff(double value, int n);

} // namespace towlab
