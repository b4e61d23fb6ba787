#pragma once

#include "towlab/operators/action.hpp"
#include "towlab/pde/solver.hpp"

#include <Eigen/Core>
#include <memory>

namespace towlab {

enum class PolicyKind {
    greedy_from_solution,
    constant_control,
    adversarial_best_response,
    zero_intensity
};

enum class PlayerRole { minimizer, maximizer };

/// Feedback (Markov) control rule. Policies see only the current state
/// and time (plus, for the responder, the opponent's announced control),
/// so decisions at step i depend on the trajectory only through step i.
class Policy {
public:
    /// Greedy policy reading interpolated discrete derivatives of a
    /// solved stack: at each decision epoch it returns the control
    /// achieving the inf of sup_b Phi (minimizer) or the sup of inf_a
    /// Phi (maximizer) on the stack's action grid. The stack must be
    /// solved with the matching bounded operator, else ConfigError.
    static Policy greedy(std::shared_ptr<const SolutionStack> stack,
                         PlayerRole role);
    static Policy constant(Control control, double intensity_bound);
    /// Maximizer that best-responds to the opponent's announced control
    /// on the stack's action grid.
    static Policy best_response(std::shared_ptr<const SolutionStack> stack);
    static Policy zero_intensity(int dim);

    PolicyKind kind() const { return kind_; }
    double intensity_bound() const { return intensity_bound_; }
    int dim() const { return dim_; }

    /// Decide without seeing the opponent (minimizer side).
    Control decide(const Eigen::VectorXd& x, double t) const;
    /// Decide after the opponent announced (maximizer side). Non-response
    /// policies ignore the opponent.
    Control respond(const Eigen::VectorXd& x, double t,
                    const Control& opponent) const;

private:
    Policy() = default;
    PolicyKind kind_ = PolicyKind::zero_intensity;
    PlayerRole role_ = PlayerRole::minimizer;
    double intensity_bound_ = 0.0;
    int dim_ = 0;
    std::shared_ptr<const SolutionStack> stack_;
    std::shared_ptr<const ActionGrid> actions_;
    Control fixed_;

    struct LocalData {
        double p_val;
        Eigen::VectorXd nu;
        Eigen::MatrixXd hessian;
    };
    LocalData local_data(const Eigen::VectorXd& x, double t) const;
};

} // namespace towlab
