#include "towlab/game/policy.hpp"

#include "towlab/core/errors.hpp"
#include "towlab/operators/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace towlab {
namespace {

std::shared_ptr<const ActionGrid> grid_for(const SolutionStack& stack) {
    return std::make_shared<const ActionGrid>(ActionGrid::make(
        stack.spec.n, stack.config.directions, stack.config.m));
}

} // namespace

Policy Policy::greedy(std::shared_ptr<const SolutionStack> stack, PlayerRole role) {
    if (!stack) throw ConfigError("greedy policy: missing solution stack");
    const OperatorChoice needed = role == PlayerRole::minimizer
                                      ? OperatorChoice::lower_m
                                      : OperatorChoice::upper_m;
    if (stack->config.operator_choice != needed)
        throw ConfigError("greedy policy: stack solved with a mismatched operator");
    Policy p;
    p.kind_ = PolicyKind::greedy_from_solution;
    p.role_ = role;
    p.stack_ = std::move(stack);
    p.actions_ = grid_for(*p.stack_);
    p.intensity_bound_ = p.stack_->config.m;
    p.dim_ = p.stack_->spec.n;
    return p;
}

Policy Policy::constant(Control control, double intensity_bound) {
    if (std::abs(control.direction.norm() - 1.0) > 1e-9)
        throw ConfigError("constant policy: direction must be unit");
    if (control.intensity < 0.0 || control.intensity > intensity_bound)
        throw ConfigError("constant policy: intensity outside [0, m]");
    Policy p;
    p.kind_ = PolicyKind::constant_control;
    p.fixed_ = std::move(control);
    p.intensity_bound_ = intensity_bound;
    p.dim_ = static_cast<int>(p.fixed_.direction.size());
    return p;
}

Policy Policy::best_response(std::shared_ptr<const SolutionStack> stack) {
    if (!stack) throw ConfigError("best response policy: missing solution stack");
    if (stack->config.operator_choice != OperatorChoice::lower_m)
        throw ConfigError("best response policy: stack solved with a mismatched operator");
    Policy p;
    p.kind_ = PolicyKind::adversarial_best_response;
    p.role_ = PlayerRole::maximizer;
    p.stack_ = std::move(stack);
    p.actions_ = grid_for(*p.stack_);
    p.intensity_bound_ = p.stack_->config.m;
    p.dim_ = p.stack_->spec.n;
    return p;
}

Policy Policy::zero_intensity(int dim) {
    Policy p;
    p.kind_ = PolicyKind::zero_intensity;
    p.fixed_ = Control{Eigen::VectorXd::Unit(dim, 0), 0.0};
    p.intensity_bound_ = 0.0;
    p.dim_ = dim;
    return p;
}

Policy::LocalData Policy::local_data(const Eigen::VectorXd& x, double t) const {
    const SolutionStack& stack = *stack_;
    const SpaceTimeGrid& grid = *stack.grid;
    const GridFunction& level = stack.level_at(t);
    const int n = grid.dim();
    const int N = grid.axis_nodes();
    const double h = grid.spacing();
    const double R = grid.half_width();

    // Clamp the query so every interpolation corner has an interior
    // stencil; the state itself is never clamped, only derivative reads.
    int cell[8];
    double w[8];
    for (int k = 0; k < n; ++k) {
        double u = (std::min(std::max(x[k], -R), R) + R) / h;
        int c = static_cast<int>(std::floor(u));
        c = std::min(std::max(c, 1), N - 3);
        cell[k] = c;
        w[k] = std::min(std::max(u - c, 0.0), 1.0);
    }

    LocalData out;
    out.nu = Eigen::VectorXd::Zero(n);
    out.hessian = Eigen::MatrixXd::Zero(n, n);
    const int corners = 1 << n;
    int multi[8];
    for (int mask = 0; mask < corners; ++mask) {
        double weight = 1.0;
        for (int k = 0; k < n; ++k) {
            const int up = (mask >> k) & 1;
            weight *= up ? w[k] : (1.0 - w[k]);
            multi[k] = cell[k] + up;
        }
        if (weight == 0.0) continue;
        const SecondOrderData d =
            discrete_derivatives(level, grid.flatten(multi));
        out.nu += weight * d.nu;
        out.hessian += weight * d.hessian;
    }
    Eigen::VectorXd xq(n);
    for (int k = 0; k < n; ++k) xq[k] = grid.axis_coord(cell[k]) + w[k] * h;
    out.p_val = stack.spec.p_field.evaluate(xq, t);
    return out;
}

Control Policy::decide(const Eigen::VectorXd& x, double t) const {
    switch (kind_) {
    case PolicyKind::zero_intensity:
    case PolicyKind::constant_control:
        return fixed_;
    case PolicyKind::adversarial_best_response:
        throw ConfigError("adversarial_best_response must play as the responder");
    case PolicyKind::greedy_from_solution: {
        const LocalData d = local_data(x, t);
        double packed[36];
        pack_upper(d.hessian, packed);
        if (role_ == PlayerRole::minimizer)
            return isaacs_lower_argmin(*actions_, d.p_val, d.nu.data(), packed);
        return isaacs_upper_argmax(*actions_, d.p_val, d.nu.data(), packed);
    }
    }
    throw std::logic_error("unreachable policy kind");
}

Control Policy::respond(const Eigen::VectorXd& x, double t,
                        const Control& opponent) const {
    if (kind_ != PolicyKind::adversarial_best_response) return decide(x, t);
    const LocalData d = local_data(x, t);
    double packed[36];
    pack_upper(d.hessian, packed);
    return isaacs_best_response(*actions_, d.p_val, d.nu.data(), packed, opponent);
}

} // namespace towlab
