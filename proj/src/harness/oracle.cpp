#include "towlab/harness/oracle.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace towlab {
namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on the
// Legendre recurrence.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
}

struct BumpParams {
    double amp, width, floor;
    Eigen::VectorXd center;
};

BumpParams bump_params(const PayoffField& bump) {
    if (bump.name != "gaussian_bump")
        throw std::invalid_argument("heat oracle: payoff must be a gaussian bump");
    BumpParams p;
    p.amp = bump.params.at("amp");
    p.width = bump.params.at("width");
    p.floor = bump.params.at("floor");
    p.center = bump.center;
    return p;
}

} // namespace

double heat_convolution_quadrature(const PayoffField& bump,
                                   const Eigen::VectorXd& x, double tau) {
    const BumpParams p = bump_params(bump);
    if (tau <= 0.0) return bump.evaluate(x);
    // The kernel and the bump factor per axis, so the n-dim integral is
    // a product of 1-D integrals.
    static thread_local std::vector<double> nodes, weights;
    if (nodes.size() != 96) gauss_legendre(96, nodes, weights);

    const double kernel_norm = 1.0 / std::sqrt(4.0 * std::numbers::pi * tau);
    double product = 1.0;
    for (int k = 0; k < x.size(); ++k) {
        const double ck = p.center[k];
        const double spread = 10.0 * (std::sqrt(2.0 * tau) + p.width);
        const double lo = std::min(x[k], ck) - spread;
        const double hi = std::max(x[k], ck) + spread;
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        double integral = 0.0;
        for (size_t q = 0; q < nodes.size(); ++q) {
            const double y = mid + half * nodes[q];
            const double a = (x[k] - y);
            const double b = (y - ck);
            integral += weights[q] * std::exp(-a * a / (4.0 * tau) -
                                              b * b / (2.0 * p.width * p.width));
        }
        product *= kernel_norm * half * integral;
    }
    // Heat flow preserves the constant floor.
    return p.floor + p.amp * product;
}

double heat_convolution_closed_form(const PayoffField& bump,
                                    const Eigen::VectorXd& x, double tau) {
    const BumpParams p = bump_params(bump);
    const double w2 = p.width * p.width;
    const double s2 = w2 + 2.0 * tau;
    const double scale = std::pow(w2 / s2, 0.5 * static_cast<double>(x.size()));
    return p.floor + p.amp * scale * std::exp(-(x - p.center).squaredNorm() / (2.0 * s2));
}

std::vector<GridFunction> quad_convolution_brute(
    const std::vector<GridFunction>& stack, const ConvolutionParams& params) {
    if (stack.empty()) return {};
    const SpaceTimeGrid& grid = *stack.front().grid;
    const std::int64_t nodes = grid.total_nodes();
    const int levels = static_cast<int>(stack.size());
    const bool sup = params.direction == ConvolutionParams::Direction::sup;
    const double c = 1.0 / (2.0 * params.eps);
    const int n = grid.dim();

    // Flatten coordinates once.
    std::vector<double> coords(static_cast<size_t>(nodes) * n);
    for (std::int64_t i = 0; i < nodes; ++i) {
        const Eigen::VectorXd xc = grid.node_coord(i);
        for (int k = 0; k < n; ++k) coords[static_cast<size_t>(i) * n + k] = xc[k];
    }

    std::vector<GridFunction> out(levels);
    for (int lt = 0; lt < levels; ++lt) {
        out[lt].grid = stack[lt].grid;
        out[lt].time = stack[lt].time;
        out[lt].values.assign(nodes, 0.0);
        for (std::int64_t i = 0; i < nodes; ++i) {
            const double* xi = coords.data() + static_cast<size_t>(i) * n;
            double best = sup ? -std::numeric_limits<double>::infinity()
                              : std::numeric_limits<double>::infinity();
            for (int ls = 0; ls < levels; ++ls) {
                const double dt2 = (stack[lt].time - stack[ls].time) *
                                   (stack[lt].time - stack[ls].time);
                const double* src = stack[ls].values.data();
                for (std::int64_t j = 0; j < nodes; ++j) {
                    const double* xj = coords.data() + static_cast<size_t>(j) * n;
                    double d2 = dt2;
                    for (int k = 0; k < n; ++k) {
                        const double dk = xi[k] - xj[k];
                        d2 += dk * dk;
                    }
                    const double cand = sup ? src[j] - c * d2 : src[j] + c * d2;
                    if (sup ? cand > best : cand < best) best = cand;
                }
            }
            out[lt].values[i] = best;
        }
    }
    return out;
}

double holder_quotient(const SolutionStack& stack, double region_half_width,
                       int sample_pairs, std::uint64_t seed) {
    const SpaceTimeGrid& grid = *stack.grid;
    const std::int64_t nodes = grid.total_nodes();
    std::vector<std::int64_t> region;
    for (std::int64_t i = 0; i < nodes; ++i) {
        const Eigen::VectorXd x = grid.node_coord(i);
        if (x.lpNorm<Eigen::Infinity>() <= region_half_width) region.push_back(i);
    }
    if (region.size() < 2 || stack.levels.empty()) return 0.0;

    std::uint64_t state = seed ? seed : 1;
    auto next = [&state]() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    };
    auto uniform = [&next]() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    };
    // Times are drawn in physical units and snapped to the nearest
    // stored level, so stacks with different time steps see the same
    // sample pairs (up to the stored spacing).
    const double horizon = grid.horizon();
    double q_max = 0.0;
    for (int s = 0; s < sample_pairs; ++s) {
        const std::int64_t i = region[next() % region.size()];
        const std::int64_t j = region[next() % region.size()];
        const GridFunction& la = stack.level_at(uniform() * horizon);
        const GridFunction& lb = stack.level_at(uniform() * horizon);
        const double du = la.values[i] - lb.values[j];
        const double dx = (grid.node_coord(i) - grid.node_coord(j)).norm();
        const double dtp = std::sqrt(std::abs(la.time - lb.time));
        if (dx + dtp == 0.0) continue;
        q_max = std::max(q_max, std::abs(du) / (dx + dtp));
    }
    return q_max;
}

} // namespace towlab
