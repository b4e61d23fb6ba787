#include "towlab/analysis/convolution.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace towlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lower envelope of the parabolas y(x) = f[j] + c (x - j s)^2 on the
// uniform line x_q = q s, written into out. Exact on the grid.
void envelope_pass(const double* f, double* out, int n, double s, double c,
                   int* centers, double* bounds) {
    int k = 0;
    centers[0] = 0;
    bounds[0] = -kInf;
    bounds[1] = kInf;
    auto xs = [s](int i) { return i * s; };
    for (int q = 1; q < n; ++q) {
        double cross;
        for (;;) {
            const int p = centers[k];
            cross = ((f[q] + c * xs(q) * xs(q)) - (f[p] + c * xs(p) * xs(p))) /
                    (2.0 * c * (xs(q) - xs(p)));
            if (cross <= bounds[k] && k > 0) {
                --k;
            } else {
                break;
            }
        }
        ++k;
        centers[k] = q;
        bounds[k] = cross;
        bounds[k + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (bounds[k + 1] < xs(q)) ++k;
        const double d = xs(q) - xs(centers[k]);
        out[q] = f[centers[k]] + c * d * d;
    }
}

} // namespace

std::vector<GridFunction> quad_convolution(const std::vector<GridFunction>& stack,
                                           const ConvolutionParams& params) {
    if (!(params.eps > 0.0))
        throw std::invalid_argument("quad_convolution: eps must be positive");
    if (stack.empty()) return {};
    const SpaceTimeGrid& grid = *stack.front().grid;
    const int n = grid.dim();
    const int N = grid.axis_nodes();
    const std::int64_t nodes = grid.total_nodes();
    const int levels = static_cast<int>(stack.size());

    double level_dt = 0.0;
    if (levels > 1) {
        level_dt = stack[0].time - stack[1].time;
        for (int l = 0; l + 1 < levels; ++l) {
            const double d = stack[l].time - stack[l + 1].time;
            if (std::abs(d - level_dt) > 1e-9 * std::max(1.0, std::abs(level_dt)))
                throw std::invalid_argument(
                    "quad_convolution: levels must be uniformly spaced in time");
        }
        level_dt = std::abs(level_dt);
    }

    const bool sup = params.direction == ConvolutionParams::Direction::sup;
    const double c = 1.0 / (2.0 * params.eps);

    // Work on the negated field for the sup direction: the envelope pass
    // computes lower envelopes (inf-convolution).
    std::vector<double> work(static_cast<size_t>(levels) * nodes);
    for (int l = 0; l < levels; ++l)
        for (std::int64_t i = 0; i < nodes; ++i)
            work[static_cast<size_t>(l) * nodes + i] =
                sup ? -stack[l].values[i] : stack[l].values[i];

    const int max_line = std::max(N, levels);
    std::vector<double> line_in(max_line), line_out(max_line), bounds(max_line + 1);
    std::vector<int> centers(max_line);

    // Space axes, level by level.
    for (int axis = 0; axis < n; ++axis) {
        const std::int64_t stride = grid.stride(axis);
        for (int l = 0; l < levels; ++l) {
            double* base = work.data() + static_cast<size_t>(l) * nodes;
            // Enumerate lines: indices whose axis coordinate is zero.
            for (std::int64_t start = 0; start < nodes; ++start) {
                const int coord = static_cast<int>((start / stride) % N);
                if (coord != 0) continue;
                for (int q = 0; q < N; ++q) line_in[q] = base[start + q * stride];
                envelope_pass(line_in.data(), line_out.data(), N, grid.spacing(),
                              c, centers.data(), bounds.data());
                for (int q = 0; q < N; ++q) base[start + q * stride] = line_out[q];
            }
        }
    }
    // Time axis, node by node.
    if (levels > 1) {
        for (std::int64_t i = 0; i < nodes; ++i) {
            for (int l = 0; l < levels; ++l)
                line_in[l] = work[static_cast<size_t>(l) * nodes + i];
            envelope_pass(line_in.data(), line_out.data(), levels, level_dt, c,
                          centers.data(), bounds.data());
            for (int l = 0; l < levels; ++l)
                work[static_cast<size_t>(l) * nodes + i] = line_out[l];
        }
    }

    std::vector<GridFunction> out(levels);
    for (int l = 0; l < levels; ++l) {
        out[l].grid = stack[l].grid;
        out[l].time = stack[l].time;
        out[l].values.resize(nodes);
        for (std::int64_t i = 0; i < nodes; ++i) {
            const double v = work[static_cast<size_t>(l) * nodes + i];
            out[l].values[i] = sup ? -v : v;
        }
    }
    return out;
}

} // namespace towlab
