#include "towlab/operators/operators.hpp"

#include "towlab/game/sim.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace towlab {
namespace {

constexpr double kUnitTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_unit(const Eigen::VectorXd& v, const char* who) {
    if (std::abs(v.norm() - 1.0) > kUnitTol)
        throw std::invalid_argument(std::string(who) + ": direction is not a unit vector");
}

double dot_n(const double* a, const double* b, int n) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) s += a[k] * b[k];
    return s;
}

// dir^T M dir from the packed upper triangle of M, for an arbitrary
// direction (used for the +-nu/|nu| augmentation).
double quad_form_packed(const double* dir, const double* m_upper, int n) {
    double q = 0.0;
    int idx = 0;
    for (int k = 0; k < n; ++k)
        for (int l = k; l < n; ++l) {
            const double w = (k == l) ? dir[k] * dir[k] : 2.0 * dir[k] * dir[l];
            q += w * m_upper[idx++];
        }
    return q;
}

// Per-query direction data: base grid rows plus the +-nu/|nu| pair.
// neg_alpha[j] = -(p-2)/2 dir_j^T M dir_j, adot[j] = <dir_j, nu>.
struct GameBuffers {
    static constexpr int kStackCap = 1040;
    double stack_a[kStackCap];
    double stack_b[kStackCap];
    std::vector<double> heap_a, heap_b;
    double* neg_alpha = nullptr;
    double* adot = nullptr;
    int total = 0;

    void fill(const ActionGrid& grid, double p_val, const double* nu,
              const double* m_upper) {
        const int d = grid.size();
        const int n = grid.dim();
        const int ps = grid.packed_size();
        const double k2 = 0.5 * (p_val - 2.0);
        total = d;
        if (d + 2 <= kStackCap) {
            neg_alpha = stack_a;
            adot = stack_b;
        } else {
            heap_a.resize(d + 2);
            heap_b.resize(d + 2);
            neg_alpha = heap_a.data();
            adot = heap_b.data();
        }
        const double* comp = grid.components();
        const double* prod = grid.products();
        for (int j = 0; j < d; ++j) {
            neg_alpha[j] = -k2 * dot_n(prod + static_cast<size_t>(j) * ps, m_upper, ps);
            adot[j] = dot_n(comp + static_cast<size_t>(j) * n, nu, n);
        }
        // Augment with the gradient direction and its antipode so the
        // canonical optimizers are always on the grid.
        double nn2 = 0.0;
        for (int k = 0; k < n; ++k) nn2 += nu[k] * nu[k];
        if (nn2 > 0.0) {
            const double nn = std::sqrt(nn2);
            double nhat[8];
            for (int k = 0; k < n; ++k) nhat[k] = nu[k] / nn;
            const double na = -k2 * quad_form_packed(nhat, m_upper, n);
            neg_alpha[d] = na;
            adot[d] = nn;
            neg_alpha[d + 1] = na;
            adot[d + 1] = -nn;
            total = d + 2;
        }
    }
};

// Lower game: min over (i, c in {0,m}) of
//   neg_alpha[i] + max( W(c) - c adot[i], W(c+m) - (c+m) adot[i] )
// where W(k) = max_j (neg_alpha[j] - k adot[j]) collects the sup side
// for intensity sum k = c + d. Endpoint intensities make the inner sup
// separable over (j, d), which is what keeps this O(total).
double lower_from_buffers(const GameBuffers& buf, double m) {
    double w0 = -kInf, w1 = -kInf, w2 = -kInf;
    for (int j = 0; j < buf.total; ++j) {
        const double na = buf.neg_alpha[j];
        const double A = buf.adot[j];
        w0 = std::max(w0, na);
        w1 = std::max(w1, na - m * A);
        w2 = std::max(w2, na - 2.0 * m * A);
    }
    double best = kInf;
    for (int i = 0; i < buf.total; ++i) {
        const double A = buf.adot[i];
        const double c0 = std::max(w0, w1 - m * A);
        const double cm = std::max(w1 - m * A, w2 - 2.0 * m * A);
        best = std::min(best, buf.neg_alpha[i] + std::min(c0, cm));
    }
    return best;
}

double upper_from_buffers(const GameBuffers& buf, double m) {
    double v0 = kInf, v1 = kInf, v2 = kInf;
    for (int i = 0; i < buf.total; ++i) {
        const double na = buf.neg_alpha[i];
        const double A = buf.adot[i];
        v0 = std::min(v0, na);
        v1 = std::min(v1, na - m * A);
        v2 = std::min(v2, na - 2.0 * m * A);
    }
    double best = -kInf;
    for (int j = 0; j < buf.total; ++j) {
        const double A = buf.adot[j];
        const double d0 = std::min(v0, v1 - m * A);
        const double dm = std::min(v1 - m * A, v2 - 2.0 * m * A);
        best = std::max(best, buf.neg_alpha[j] + std::max(d0, dm));
    }
    return best;
}

Eigen::VectorXd buffer_direction(const ActionGrid& grid, const double* nu, int idx) {
    const int d = grid.size();
    if (idx < d) return grid.directions()[idx];
    Eigen::VectorXd nhat = Eigen::Map<const Eigen::VectorXd>(nu, grid.dim()).normalized();
    return idx == d ? nhat : Eigen::VectorXd(-nhat);
}

SecondOrderData checked(const SecondOrderData& data, const ProblemSpec& spec) {
    check_second_order(data);
    if (data.nu.size() != spec.n)
        throw std::invalid_argument("isaacs: gradient dimension mismatch");
    return data;
}

} // namespace

void check_second_order(const SecondOrderData& data) {
    const auto n = data.nu.size();
    if (data.hessian.rows() != n || data.hessian.cols() != n)
        throw std::invalid_argument("SecondOrderData: inconsistent shapes");
    const double scale = 1.0 + data.hessian.cwiseAbs().maxCoeff();
    const double asym = (data.hessian - data.hessian.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale)
        throw std::invalid_argument("SecondOrderData: hessian is not symmetric");
}

Eigen::MatrixXd diffusion_matrix(const Eigen::VectorXd& a,
                                 const Eigen::VectorXd& b, double p_val) {
    require_unit(a, "diffusion_matrix");
    require_unit(b, "diffusion_matrix");
    const auto n = a.size();
    Eigen::MatrixXd A = 0.5 * (p_val - 2.0) * (a * a.transpose() + b * b.transpose());
    A += Eigen::MatrixXd::Identity(n, n);
    return A;
}

Eigen::MatrixXd sigma_matrix(const Eigen::VectorXd& a,
                             const Eigen::VectorXd& b, double p_val) {
    require_unit(a, "sigma_matrix");
    require_unit(b, "sigma_matrix");
    if (!(p_val > 1.0))
        throw std::domain_error("sigma_matrix: requires p > 1");
    const auto n = a.size();
    const double root = std::sqrt(p_val - 1.0);
    Eigen::MatrixXd sigma(n, 2 * n);
    sigma.col(0) = root * a;
    sigma.block(0, 1, n, n - 1) = orthogonal_complement_basis(a);
    sigma.col(n) = root * b;
    sigma.block(0, n + 1, n, n - 1) = orthogonal_complement_basis(b);
    return sigma;
}

double phi(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double c,
           double d, const Eigen::VectorXd& x, double t,
           const SecondOrderData& data, const ProblemSpec& spec) {
    require_unit(a, "phi");
    require_unit(b, "phi");
    if (c < 0.0 || d < 0.0)
        throw std::invalid_argument("phi: intensities must be nonnegative");
    const double p_val = spec.p_field.evaluate(x, t);
    const Eigen::MatrixXd A = diffusion_matrix(a, b, p_val);
    return -(A * data.hessian).trace() - (c + d) * (a + b).dot(data.nu) -
           spec.mu.dot(data.nu);
}

double isaacs_lower_game(const ActionGrid& grid, double p_val,
                         const double* nu, const double* m_upper) {
    GameBuffers buf;
    buf.fill(grid, p_val, nu, m_upper);
    return lower_from_buffers(buf, grid.intensity_bound());
}

double isaacs_upper_game(const ActionGrid& grid, double p_val,
                         const double* nu, const double* m_upper) {
    GameBuffers buf;
    buf.fill(grid, p_val, nu, m_upper);
    return upper_from_buffers(buf, grid.intensity_bound());
}

Control isaacs_lower_argmin(const ActionGrid& grid, double p_val,
                            const double* nu, const double* m_upper) {
    GameBuffers buf;
    buf.fill(grid, p_val, nu, m_upper);
    const double m = grid.intensity_bound();
    double w0 = -kInf, w1 = -kInf, w2 = -kInf;
    for (int j = 0; j < buf.total; ++j) {
        const double na = buf.neg_alpha[j];
        const double A = buf.adot[j];
        w0 = std::max(w0, na);
        w1 = std::max(w1, na - m * A);
        w2 = std::max(w2, na - 2.0 * m * A);
    }
    double best = kInf;
    int best_i = 0;
    double best_c = 0.0;
    for (int i = 0; i < buf.total; ++i) {
        const double A = buf.adot[i];
        const double v_c0 = buf.neg_alpha[i] + std::max(w0, w1 - m * A);
        const double v_cm = buf.neg_alpha[i] + std::max(w1 - m * A, w2 - 2.0 * m * A);
        if (v_c0 < best) { best = v_c0; best_i = i; best_c = 0.0; }
        if (v_cm < best) { best = v_cm; best_i = i; best_c = m; }
    }
    return Control{buffer_direction(grid, nu, best_i), best_c};
}

Control isaacs_upper_argmax(const ActionGrid& grid, double p_val,
                            const double* nu, const double* m_upper) {
    GameBuffers buf;
    buf.fill(grid, p_val, nu, m_upper);
    const double m = grid.intensity_bound();
    double v0 = kInf, v1 = kInf, v2 = kInf;
    for (int i = 0; i < buf.total; ++i) {
        const double na = buf.neg_alpha[i];
        const double A = buf.adot[i];
        v0 = std::min(v0, na);
        v1 = std::min(v1, na - m * A);
        v2 = std::min(v2, na - 2.0 * m * A);
    }
    double best = -kInf;
    int best_j = 0;
    double best_d = 0.0;
    for (int j = 0; j < buf.total; ++j) {
        const double A = buf.adot[j];
        const double u_d0 = buf.neg_alpha[j] + std::min(v0, v1 - m * A);
        const double u_dm = buf.neg_alpha[j] + std::min(v1 - m * A, v2 - 2.0 * m * A);
        if (u_d0 > best) { best = u_d0; best_j = j; best_d = 0.0; }
        if (u_dm > best) { best = u_dm; best_j = j; best_d = m; }
    }
    return Control{buffer_direction(grid, nu, best_j), best_d};
}

Control isaacs_best_response(const ActionGrid& grid, double p_val,
                             const double* nu, const double* m_upper,
                             const Control& opponent) {
    GameBuffers buf;
    buf.fill(grid, p_val, nu, m_upper);
    const double m = grid.intensity_bound();
    const int n = grid.dim();
    const double a_dot = dot_n(opponent.direction.data(), nu, n);
    const double c = opponent.intensity;
    double best = -kInf;
    int best_j = 0;
    double best_d = 0.0;
    for (int j = 0; j < buf.total; ++j) {
        const double s = a_dot + buf.adot[j];
        const double f_d0 = buf.neg_alpha[j] - c * s;
        const double f_dm = buf.neg_alpha[j] - (c + m) * s;
        if (f_d0 > best) { best = f_d0; best_j = j; best_d = 0.0; }
        if (f_dm > best) { best = f_dm; best_j = j; best_d = m; }
    }
    return Control{buffer_direction(grid, nu, best_j), best_d};
}

double isaacs_lower(const ActionGrid& actions, const Eigen::VectorXd& x,
                    double t, const SecondOrderData& data,
                    const ProblemSpec& spec) {
    const SecondOrderData d = checked(data, spec);
    if (actions.dim() != spec.n)
        throw std::invalid_argument("isaacs_lower: action grid dimension mismatch");
    const double p_val = spec.p_field.evaluate(x, t);
    double packed[36];
    pack_upper(d.hessian, packed);
    const double game = isaacs_lower_game(actions, p_val, d.nu.data(), packed);
    return game - d.hessian.trace() - spec.mu.dot(d.nu) + spec.r * d.xi;
}

double isaacs_upper(const ActionGrid& actions, const Eigen::VectorXd& x,
                    double t, const SecondOrderData& data,
                    const ProblemSpec& spec) {
    const SecondOrderData d = checked(data, spec);
    if (actions.dim() != spec.n)
        throw std::invalid_argument("isaacs_upper: action grid dimension mismatch");
    const double p_val = spec.p_field.evaluate(x, t);
    double packed[36];
    pack_upper(d.hessian, packed);
    const double game = isaacs_upper_game(actions, p_val, d.nu.data(), packed);
    return game - d.hessian.trace() - spec.mu.dot(d.nu) + spec.r * d.xi;
}

double f_limit(const Eigen::VectorXd& x, double t, const SecondOrderData& data,
               const ProblemSpec& spec) {
    check_second_order(data);
    const double nn = data.nu.norm();
    if (nn == 0.0)
        throw std::domain_error("f_limit: gradient vanishes; use f_envelopes");
    const double p_val = spec.p_field.evaluate(x, t);
    const double quad = data.nu.dot(data.hessian * data.nu) / (nn * nn);
    return (p_val - 2.0) * quad + data.hessian.trace() + spec.mu.dot(data.nu) -
           spec.r * data.xi;
}

std::pair<double, double> f_envelopes(const Eigen::VectorXd& x, double t,
                                      const SecondOrderData& data,
                                      const ProblemSpec& spec) {
    check_second_order(data);
    if (data.nu.norm() != 0.0)
        throw std::domain_error("f_envelopes: gradient must vanish");
    const double p_val = spec.p_field.evaluate(x, t);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(data.hessian);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    const double base = data.hessian.trace() - spec.r * data.xi;
    const double coef = p_val - 2.0;
    const double lower = base + (coef >= 0.0 ? coef * lo : coef * hi);
    const double upper = base + (coef >= 0.0 ? coef * hi : coef * lo);
    return {lower, upper};
}

double pucci(const Eigen::MatrixXd& M, double lambda, double Lambda,
             PucciSign sign) {
    if (!(lambda > 0.0) || Lambda < lambda)
        throw std::domain_error("pucci: need 0 < lambda <= Lambda");
    SecondOrderData probe{0.0, Eigen::VectorXd::Zero(M.rows()), M};
    check_second_order(probe);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);
    double value = 0.0;
    for (int i = 0; i < eig.eigenvalues().size(); ++i) {
        const double ev = eig.eigenvalues()[i];
        if (sign == PucciSign::plus)
            value += ev > 0.0 ? Lambda * ev : lambda * ev;
        else
            value += ev > 0.0 ? lambda * ev : Lambda * ev;
    }
    return value;
}

} // namespace towlab
