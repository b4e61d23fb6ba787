#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <vector>

namespace towlab {

/// Uniform tensor grid on [-R, R]^n with n_t time levels running from
/// t = T down to t = 0, T = (n_t - 1) * dt. Space index is row-major
/// with the last coordinate fastest.
class SpaceTimeGrid {
public:
    SpaceTimeGrid(int dim, double half_width, double spacing, double dt, int n_t);

    /// Snap half_width to an integer number of spacings and choose n_t
    /// so that dt <= dt_bound divides horizon exactly.
    static SpaceTimeGrid make(int dim, double half_width, double spacing,
                              double horizon, double dt_bound);

    int dim() const { return dim_; }
    int axis_nodes() const { return axis_nodes_; }
    double half_width() const { return half_width_; }
    double spacing() const { return spacing_; }
    double dt() const { return dt_; }
    int n_t() const { return n_t_; }
    double horizon() const { return dt_ * (n_t_ - 1); }
    double time_of_level(int level) const { return horizon() - level * dt_; }

    std::int64_t total_nodes() const { return total_nodes_; }
    double axis_coord(int i) const { return -half_width_ + i * spacing_; }

    void unflatten(std::int64_t idx, int* out) const;
    std::int64_t flatten(const int* multi) const;
    Eigen::VectorXd node_coord(std::int64_t idx) const;
    /// True if the node is at least `margin` nodes away from every face.
    bool is_interior(std::int64_t idx, int margin = 1) const;
    std::int64_t stride(int axis) const { return strides_[axis]; }

private:
    int dim_;
    int axis_nodes_;
    double half_width_;
    double spacing_;
    double dt_;
    int n_t_;
    std::int64_t total_nodes_;
    std::vector<std::int64_t> strides_;
};

/// Values of a scalar function on one time level of a grid.
struct GridFunction {
    std::shared_ptr<const SpaceTimeGrid> grid;
    double time = 0.0;
    std::vector<double> values;
};

/// Multilinear interpolation; exact at nodes and on affine functions.
/// Throws std::domain_error for queries outside the grid box (callers
/// must clamp or extend).
double interpolate(const GridFunction& f, const Eigen::VectorXd& x);

} // namespace towlab
