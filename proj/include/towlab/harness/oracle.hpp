#pragma once

#include "towlab/analysis/convolution.hpp"
#include "towlab/core/fields.hpp"
#include "towlab/pde/solver.hpp"

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace towlab {

/// Convolution of a gaussian-bump payoff with the heat kernel of
/// u_t = Delta u over elapsed time tau (per-axis variance 2 tau),
/// evaluated by tensor-product Gauss-Legendre quadrature. Independent of
/// the finite-difference path it checks.
double heat_convolution_quadrature(const PayoffField& bump,
                                   const Eigen::VectorXd& x, double tau);

/// Closed form of the same convolution (gaussian times gaussian); used
/// to cross-check the quadrature in tests.
double heat_convolution_closed_form(const PayoffField& bump,
                                    const Eigen::VectorXd& x, double tau);

/// O(N^2) reference for quad_convolution: per output point, scan every
/// grid point of every level.
std::vector<GridFunction> quad_convolution_brute(
    const std::vector<GridFunction>& stack, const ConvolutionParams& params);

/// Largest parabolic difference quotient
/// |u(x,t) - u(y,s)| / (|x-y| + sqrt(|t-s|)) over a deterministic sample
/// of node/level pairs inside |x|_inf <= region_half_width.
double holder_quotient(const SolutionStack& stack, double region_half_width,
                       int sample_pairs, std::uint64_t seed);

} // namespace towlab
