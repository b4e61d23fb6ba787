#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>
#include <vector>

namespace towlab {

/// One player's control: a unit direction and an intensity in [0, m].
struct Control {
    Eigen::VectorXd direction;
    double intensity = 0.0;
};

/// Deterministic discretization of the sphere of directions, paired with
/// the intensity bound m. The set is closed under negation
/// (directions[j + size/2] == -directions[j]), and evaluators augment it
/// with +-nu/|nu| per query so the canonical optimizers are always
/// available.
class ActionGrid {
public:
    /// dim >= 2, direction_count even and >= 4, intensity_bound > 0.
    /// dim == 2 uses a uniform angular grid; dim == 3 a spherical
    /// Fibonacci covering; higher dims a Halton-quantile covering.
    static ActionGrid make(int dim, int direction_count, double intensity_bound);

    int dim() const { return dim_; }
    int size() const { return static_cast<int>(directions_.size()); }
    double intensity_bound() const { return m_; }
    const std::vector<Eigen::VectorXd>& directions() const { return directions_; }
    const std::string& resolution_descriptor() const { return descriptor_; }

    // Flat per-direction data for hot loops.
    // components: size() rows of dim() entries.
    // products:   size() rows of dim(dim+1)/2 entries, upper triangle packed
    //             row-wise with off-diagonal entries doubled, so that
    //             dir^T M dir = dot(products_row, packed_upper(M)).
    const double* components() const { return components_.data(); }
    const double* products() const { return products_.data(); }
    int packed_size() const { return dim_ * (dim_ + 1) / 2; }

private:
    ActionGrid() = default;
    int dim_ = 0;
    double m_ = 0.0;
    std::vector<Eigen::VectorXd> directions_;
    std::vector<double> components_;
    std::vector<double> products_;
    std::string descriptor_;
};

/// Pack the upper triangle of a symmetric matrix row-wise:
/// (M00, M01, ..., M0n, M11, M12, ...). Matches ActionGrid::products().
void pack_upper(const Eigen::MatrixXd& M, double* out);

} // namespace towlab
