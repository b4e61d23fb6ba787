#include "towlab/core/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace towlab {

SpaceTimeGrid::SpaceTimeGrid(int dim, double half_width, double spacing,
                             double dt, int n_t)
    : dim_(dim), half_width_(half_width), spacing_(spacing), dt_(dt), n_t_(n_t) {
    if (dim < 1) throw std::invalid_argument("SpaceTimeGrid: dim must be >= 1");
    if (spacing <= 0.0 || half_width < spacing)
        throw std::invalid_argument("SpaceTimeGrid: bad spatial extent");
    if (dt <= 0.0 || n_t < 2)
        throw std::invalid_argument("SpaceTimeGrid: need dt > 0 and n_t >= 2");
    const double ratio = half_width / spacing;
    const long half_cells = std::lround(ratio);
    if (std::abs(ratio - static_cast<double>(half_cells)) > 1e-9)
        throw std::invalid_argument("SpaceTimeGrid: half_width must be a multiple of spacing");
    axis_nodes_ = static_cast<int>(2 * half_cells + 1);
    strides_.assign(dim_, 1);
    total_nodes_ = 1;
    for (int k = dim_ - 1; k >= 0; --k) {
        strides_[k] = total_nodes_;
        total_nodes_ *= axis_nodes_;
    }
}

SpaceTimeGrid SpaceTimeGrid::make(int dim, double half_width, double spacing,
                                  double horizon, double dt_bound) {
    if (horizon <= 0.0 || dt_bound <= 0.0)
        throw std::invalid_argument("SpaceTimeGrid::make: bad time extent");
    const long half_cells = std::max(1L, std::lround(half_width / spacing));
    const double r_eff = spacing * static_cast<double>(half_cells);
    const int n_t = 1 + static_cast<int>(std::ceil(horizon / dt_bound - 1e-12));
    const double dt = horizon / static_cast<double>(n_t - 1);
    return SpaceTimeGrid(dim, r_eff, spacing, dt, n_t);
}

void SpaceTimeGrid::unflatten(std::int64_t idx, int* out) const {
    for (int k = 0; k < dim_; ++k) {
        out[k] = static_cast<int>(idx / strides_[k]);
        idx %= strides_[k];
    }
}

std::int64_t SpaceTimeGrid::flatten(const int* multi) const {
    std::int64_t idx = 0;
    for (int k = 0; k < dim_; ++k) idx += strides_[k] * multi[k];
    return idx;
}

Eigen::VectorXd SpaceTimeGrid::node_coord(std::int64_t idx) const {
    Eigen::VectorXd x(dim_);
    for (int k = 0; k < dim_; ++k) {
        const int i = static_cast<int>(idx / strides_[k]);
        idx %= strides_[k];
        x[k] = axis_coord(i);
    }
    return x;
}

bool SpaceTimeGrid::is_interior(std::int64_t idx, int margin) const {
    for (int k = 0; k < dim_; ++k) {
        const int i = static_cast<int>(idx / strides_[k]);
        idx %= strides_[k];
        if (i < margin || i >= axis_nodes_ - margin) return false;
    }
    return true;
}

double interpolate(const GridFunction& f, const Eigen::VectorXd& x) {
    const SpaceTimeGrid& g = *f.grid;
    const int n = g.dim();
    if (x.size() != n) throw std::invalid_argument("interpolate: dimension mismatch");
    const double R = g.half_width();
    const double h = g.spacing();
    const int N = g.axis_nodes();

    // Cell index and local weights per axis.
    int cell[8];
    double w[8];
    if (n > 8) throw std::invalid_argument("interpolate: dimension too large");
    for (int k = 0; k < n; ++k) {
        const double xk = x[k];
        if (xk < -R - 1e-12 || xk > R + 1e-12)
            throw std::domain_error("interpolate: query outside grid box");
        double u = (xk + R) / h;
        int c = static_cast<int>(std::floor(u));
        if (c < 0) c = 0;
        if (c > N - 2) c = N - 2;
        cell[k] = c;
        w[k] = u - c;
    }

    // Accumulate over the 2^n cell corners.
    double value = 0.0;
    const int corners = 1 << n;
    for (int mask = 0; mask < corners; ++mask) {
        double weight = 1.0;
        std::int64_t idx = 0;
        for (int k = 0; k < n; ++k) {
            const int up = (mask >> k) & 1;
            weight *= up ? w[k] : (1.0 - w[k]);
            idx += g.stride(k) * (cell[k] + up);
        }
        if (weight != 0.0) value += weight * f.values[idx];
    }
    return value;
}

} // namespace towlab
