#pragma once

#include "towlab/core/problem.hpp"
#include "towlab/operators/action.hpp"

#include <Eigen/Core>
#include <utility>

namespace towlab {

/// The (value, gradient, Hessian) triple fed to the operators.
struct SecondOrderData {
    double xi = 0.0;
    Eigen::VectorXd nu;
    Eigen::MatrixXd hessian;
};

/// Throws std::invalid_argument unless hessian is symmetric to
/// 1e-12 * (1 + max |entry|) and shapes are consistent.
void check_second_order(const SecondOrderData& data);

/// A_{a,b} = (p-2)/2 (a (x) a + b (x) b) + I. Eigenvalues lie in
/// [min(1, p-1), max(1, p-1)].
Eigen::MatrixXd diffusion_matrix(const Eigen::VectorXd& a,
                                 const Eigen::VectorXd& b, double p_val);

/// n x 2n noise loading [a sqrt(p-1) | P_a | b sqrt(p-1) | P_b] with
/// P_* an orthonormal basis of the orthogonal complement. Satisfies
/// (1/2) sigma sigma^T = diffusion_matrix(a, b, p_val).
Eigen::MatrixXd sigma_matrix(const Eigen::VectorXd& a,
                             const Eigen::VectorXd& b, double p_val);

/// Phi(a,b,c,d;(x,t),nu,M) = -tr(A_{a,b} M) - (c+d)<a+b, nu> - <mu, nu>,
/// the control-parameterized linear operator under the inf/sup.
double phi(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double c,
           double d, const Eigen::VectorXd& x, double t,
           const SecondOrderData& data, const ProblemSpec& spec);

/// Bellman-Isaacs lower operator: inf over (a,c) of sup over (b,d) of
/// phi + r xi, with intensities optimized exactly over {0, m} (phi is
/// affine in each) and directions over the grid augmented by +-nu/|nu|.
double isaacs_lower(const ActionGrid& actions, const Eigen::VectorXd& x,
                    double t, const SecondOrderData& data,
                    const ProblemSpec& spec);

/// sup-inf counterpart; isaacs_lower >= isaacs_upper on a shared grid.
double isaacs_upper(const ActionGrid& actions, const Eigen::VectorXd& x,
                    double t, const SecondOrderData& data,
                    const ProblemSpec& spec);

/// Limiting operator for unbounded intensities:
/// F = (p-2) <M nu, nu>/|nu|^2 + tr M + <mu, nu> - r xi. Requires nu != 0.
double f_limit(const Eigen::VectorXd& x, double t, const SecondOrderData& data,
               const ProblemSpec& spec);

/// Semicontinuous envelopes (F_*, F^*) of f_limit at nu = 0, computed
/// from the eigenvalues of M. Requires nu == 0 in data.
std::pair<double, double> f_envelopes(const Eigen::VectorXd& x, double t,
                                      const SecondOrderData& data,
                                      const ProblemSpec& spec);

enum class PucciSign { plus, minus };

/// Pucci extremal operator over symmetric matrices with eigenvalues in
/// [lambda, Lambda]: P+ weights positive eigenvalues by Lambda and
/// negative ones by lambda; P- swaps the weights.
double pucci(const Eigen::MatrixXd& M, double lambda, double Lambda,
             PucciSign sign);

// ---------------------------------------------------------------------
// Flat fast path shared by the PDE solver and the feedback policies.
// All functions are pure; scratch lives on the caller's stack.

/// Game part of the lower operator (no tr M, <mu,nu> or r xi terms):
///   min over (i, c in {0,m}) of max over (j, d in {0,m}) of
///     -alpha_i - alpha_j - (c+d) (<dir_i,nu> + <dir_j,nu>)
/// with alpha = (p-2)/2 dir^T M dir. m_upper is the packed upper
/// triangle of M (see pack_upper). Full operator value:
///   isaacs_lower = game - tr M - <mu,nu> + r xi.
double isaacs_lower_game(const ActionGrid& grid, double p_val,
                         const double* nu, const double* m_upper);

double isaacs_upper_game(const ActionGrid& grid, double p_val,
                         const double* nu, const double* m_upper);

/// Control achieving the outer inf of the lower game (first index in
/// deterministic grid order wins ties; intensity ties break to 0).
Control isaacs_lower_argmin(const ActionGrid& grid, double p_val,
                            const double* nu, const double* m_upper);

/// Control achieving the outer sup of the upper game.
Control isaacs_upper_argmax(const ActionGrid& grid, double p_val,
                            const double* nu, const double* m_upper);

/// Maximizer's best response (b,d) to an announced minimizer control,
/// over the same grid (plus +-nu/|nu|) with d in {0, m}.
Control isaacs_best_response(const ActionGrid& grid, double p_val,
                             const double* nu, const double* m_upper,
                             const Control& opponent);

} // namespace towlab
