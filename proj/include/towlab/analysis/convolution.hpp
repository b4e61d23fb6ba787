#pragma once

#include "towlab/core/grid.hpp"

#include <vector>

namespace towlab {

struct ConvolutionParams {
    enum class Direction { sup, inf };
    double eps = 0.1;
    Direction direction = Direction::sup;
};

/// Quadratic sup/inf-convolution of a space-time stack, exactly on the
/// grid: out(x,t) = sup_{(z,s)} [ f(z,s) -/+ ((t-s)^2 + |x-z|^2) / (2 eps) ]
/// (inf with the signs flipped). Computed by the separable quadratic
/// envelope algorithm, one linear pass per dimension including time.
/// Levels must be uniformly spaced in time.
std::vector<GridFunction> quad_convolution(const std::vector<GridFunction>& stack,
                                           const ConvolutionParams& params);

} // namespace towlab
