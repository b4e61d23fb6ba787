#include "towlab/analysis/barrier.hpp"

#include <cmath>
#include <stdexcept>

namespace towlab {
namespace {

void check_eps(double eps01) {
    if (!(eps01 > 0.0 && eps01 < 1.0))
        throw std::domain_error("barrier: eps must lie in (0, 1)");
}

} // namespace

double barrier_rate(const ProblemSpec& spec) {
    const double big_lambda = std::max(1.0, spec.p_field.p_max - 1.0);
    return 4.0 * spec.lipschitz_g * (spec.n * big_lambda + spec.mu.norm());
}

double barrier_upper(const Eigen::VectorXd& y, double eps01,
                     const Eigen::VectorXd& x, double t,
                     const ProblemSpec& spec) {
    check_eps(eps01);
    const double a = barrier_rate(spec);
    return spec.payoff.evaluate(y) + a / std::sqrt(eps01) * (spec.T - t) +
           2.0 * spec.lipschitz_g * std::sqrt((x - y).squaredNorm() + eps01);
}

double barrier_lower(const Eigen::VectorXd& y, double eps01,
                     const Eigen::VectorXd& x, double t,
                     const ProblemSpec& spec) {
    check_eps(eps01);
    const double a = barrier_rate(spec);
    return spec.payoff.evaluate(y) - a / std::sqrt(eps01) * (spec.T - t) -
           2.0 * spec.lipschitz_g * std::sqrt((x - y).squaredNorm() + eps01);
}

double doubling_barrier(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                        double t, double delta, double gamma) {
    if (!(t > 0.0)) throw std::domain_error("doubling_barrier: t must be positive");
    if (delta < 0.0 || gamma < 0.0)
        throw std::domain_error("doubling_barrier: delta, gamma must be nonnegative");
    return delta * (x.squaredNorm() + y.squaredNorm()) + gamma / t;
}

} // namespace towlab
