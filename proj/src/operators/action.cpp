#include "towlab/operators/action.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace towlab {
namespace {

// Van der Corput radical inverse for the Halton covering.
double radical_inverse(int base, int i) {
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (i > 0) {
        r += f * (i % base);
        i /= base;
        f *= inv;
    }
    return r;
}

// Acklam's rational approximation of the standard normal quantile
// (relative error below 1.15e-9; plenty for direction generation).
double normal_quantile(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00, 2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1 - plow;
    if (p < plow) {
        const double q = std::sqrt(-2 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    if (p > phigh) {
        const double q = std::sqrt(-2 * std::log(1 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    const double q = p - 0.5, s = q * q;
    return (((((a[0] * s + a[1]) * s + a[2]) * s + a[3]) * s + a[4]) * s + a[5]) * q /
           (((((b[0] * s + b[1]) * s + b[2]) * s + b[3]) * s + b[4]) * s + 1);
}

std::vector<Eigen::VectorXd> half_directions(int dim, int half) {
    std::vector<Eigen::VectorXd> dirs;
    dirs.reserve(half);
    if (dim == 2) {
        const double step = std::numbers::pi / half; // half circle
        for (int j = 0; j < half; ++j) {
            Eigen::VectorXd v(2);
            v << std::cos(step * j), std::sin(step * j);
            dirs.push_back(v);
        }
    } else if (dim == 3) {
        // Spherical Fibonacci points on the upper hemisphere.
        const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int j = 0; j < half; ++j) {
            const double z = (j + 0.5) / half; // (0, 1]
            const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double theta = golden * j;
            Eigen::VectorXd v(3);
            v << rho * std::cos(theta), rho * std::sin(theta), z;
            dirs.push_back(v.normalized());
        }
    } else {
        // Halton points mapped through the normal quantile, normalized.
        static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
        if (dim > 8)
            throw std::invalid_argument("ActionGrid: dim > 8 not supported");
        for (int j = 0; j < half; ++j) {
            Eigen::VectorXd v(dim);
            for (int k = 0; k < dim; ++k) {
                double u = radical_inverse(primes[k], j + 1);
                u = std::min(std::max(u, 1e-12), 1.0 - 1e-12);
                v[k] = normal_quantile(u);
            }
            if (v.norm() < 1e-9) v[0] = 1.0;
            dirs.push_back(v.normalized());
        }
    }
    return dirs;
}

} // namespace

ActionGrid ActionGrid::make(int dim, int direction_count, double intensity_bound) {
    if (dim < 2) throw std::invalid_argument("ActionGrid: dim must be >= 2");
    if (direction_count < 4 || direction_count % 2 != 0)
        throw std::invalid_argument("ActionGrid: direction_count must be even and >= 4");
    if (!(intensity_bound > 0.0))
        throw std::invalid_argument("ActionGrid: intensity bound must be positive");

    ActionGrid g;
    g.dim_ = dim;
    g.m_ = intensity_bound;
    const int half = direction_count / 2;
    auto base = half_directions(dim, half);
    g.directions_.reserve(direction_count);
    for (auto& v : base) g.directions_.push_back(v.normalized());
    for (int j = 0; j < half; ++j) g.directions_.push_back(-g.directions_[j]);

    const int ps = g.packed_size();
    g.components_.resize(static_cast<size_t>(direction_count) * dim);
    g.products_.resize(static_cast<size_t>(direction_count) * ps);
    for (int j = 0; j < direction_count; ++j) {
        const Eigen::VectorXd& v = g.directions_[j];
        for (int k = 0; k < dim; ++k) g.components_[j * dim + k] = v[k];
        int idx = 0;
        for (int k = 0; k < dim; ++k)
            for (int l = k; l < dim; ++l) {
                const double w = (k == l) ? v[k] * v[k] : 2.0 * v[k] * v[l];
                g.products_[j * ps + idx++] = w;
            }
    }
    const char* family = dim == 2 ? "uniform-angle" : (dim == 3 ? "fibonacci" : "halton");
    g.descriptor_ = std::string(family) + "-" + std::to_string(direction_count);
    return g;
}

void pack_upper(const Eigen::MatrixXd& M, double* out) {
    const int n = static_cast<int>(M.rows());
    int idx = 0;
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) out[idx++] = M(k, l);
}

} // namespace towlab
