#include "towlab/game/sim.hpp"

#include "towlab/core/errors.hpp"
#include "towlab/operators/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace towlab {
namespace {

constexpr double kUnitTol = 1e-9;

void require_admissible(const Control& c, double bound, const char* who) {
    if (std::abs(c.direction.norm() - 1.0) > kUnitTol)
        throw ConfigError(std::string(who) + ": control direction is not unit");
    if (c.intensity < 0.0 || c.intensity > bound + 1e-12)
        throw ConfigError(std::string(who) + ": control intensity outside [0, m]");
}

// Shared stepping arithmetic; frames are the orthonormal complements of
// the two control directions (rebuilt only when controls change).
Eigen::VectorXd step_with_frames(const Eigen::VectorXd& x, double t,
                                 const JointControl& g,
                                 const Eigen::MatrixXd& frame_a,
                                 const Eigen::MatrixXd& frame_b, double dt,
                                 std::span<const double> z,
                                 const ProblemSpec& spec) {
    const int n = spec.n;
    const double p_val = spec.p_field.evaluate(x, t);
    const double root = std::sqrt(p_val - 1.0);
    const double sq = std::sqrt(dt);
    Eigen::VectorXd out = x + dt * (spec.mu + (g.c + g.d) * (g.a + g.b));
    out += (sq * root * z[0]) * g.a;
    out += (sq * root * z[n]) * g.b;
    for (int k = 0; k < n - 1; ++k) {
        out += (sq * z[1 + k]) * frame_a.col(k);
        out += (sq * z[n + 1 + k]) * frame_b.col(k);
    }
    return out;
}

} // namespace

Eigen::MatrixXd orthogonal_complement_basis(const Eigen::VectorXd& nu) {
    const auto n = nu.size();
    if (n < 2)
        throw std::domain_error("orthogonal_complement_basis: need dimension >= 2");
    const double norm = nu.norm();
    if (norm == 0.0)
        throw std::domain_error("orthogonal_complement_basis: zero vector");
    if (std::abs(norm - 1.0) > kUnitTol)
        throw std::invalid_argument("orthogonal_complement_basis: input must be unit");
    const Eigen::VectorXd u = nu / norm;

    // Reflection H = 2 v v^T / |v|^2 - I with v = u + e1 carries e1 to u;
    // columns 2..n of H are an orthonormal basis of the complement.
    // Degenerates at u = -e1, where the coordinate complement works.
    Eigen::VectorXd v = u;
    v[0] += 1.0;
    const double vv = v.squaredNorm();
    Eigen::MatrixXd basis(n, n - 1);
    if (vv < 1e-24) {
        basis.setZero();
        for (int k = 1; k < n; ++k) basis(k, k - 1) = 1.0;
        return basis;
    }
    for (int k = 1; k < n; ++k)
        basis.col(k - 1) = (2.0 * v[k] / vv) * v - Eigen::VectorXd::Unit(n, k);
    return basis;
}

Eigen::VectorXd em_step(const Eigen::VectorXd& x, double t,
                        const JointControl& g, double dt,
                        std::span<const double> z, const ProblemSpec& spec) {
    if (!(dt > 0.0)) throw std::invalid_argument("em_step: dt must be positive");
    if (static_cast<int>(z.size()) != 2 * spec.n)
        throw std::invalid_argument("em_step: need a 2n standard normal draw");
    require_admissible(Control{g.a, g.c}, std::numeric_limits<double>::infinity(),
                       "em_step");
    require_admissible(Control{g.b, g.d}, std::numeric_limits<double>::infinity(),
                       "em_step");
    const Eigen::MatrixXd frame_a = orthogonal_complement_basis(g.a);
    const Eigen::MatrixXd frame_b = orthogonal_complement_basis(g.b);
    return step_with_frames(x, t, g, frame_a, frame_b, dt, z, spec);
}

Trajectory simulate(const Policy& policy_min, const Policy& policy_max,
                    const Eigen::VectorXd& x0, double t0, double dt,
                    int epoch_steps, NormalStream& noise,
                    const ProblemSpec& spec, bool record_path) {
    if (!(dt > 0.0) || epoch_steps < 1)
        throw std::invalid_argument("simulate: bad step configuration");
    const double span = spec.T - t0;
    if (!(span > 0.0)) throw std::invalid_argument("simulate: t0 must be before T");
    const double steps_real = span / dt;
    const long steps = std::lround(steps_real);
    if (steps < 1 || std::abs(steps_real - static_cast<double>(steps)) > 1e-9 * steps_real)
        throw std::invalid_argument("simulate: dt must divide T - t0");

    Trajectory traj;
    if (record_path) {
        traj.times.reserve(steps + 1);
        traj.states.reserve(steps + 1);
        traj.controls.reserve(steps);
    }
    Eigen::VectorXd x = x0;
    double t = t0;
    if (record_path) {
        traj.times.push_back(t);
        traj.states.push_back(x);
    }

    JointControl g;
    Eigen::MatrixXd frame_a, frame_b;
    std::vector<double> z(2 * spec.n);
    for (long step = 0; step < steps; ++step) {
        if (step % epoch_steps == 0) {
            const Control cmin = policy_min.decide(x, t);
            const Control cmax = policy_max.respond(x, t, cmin);
            require_admissible(cmin, policy_min.intensity_bound(), "simulate/minimizer");
            require_admissible(cmax, policy_max.intensity_bound(), "simulate/maximizer");
            g = JointControl{cmin.direction, cmax.direction, cmin.intensity,
                             cmax.intensity};
            frame_a = orthogonal_complement_basis(g.a);
            frame_b = orthogonal_complement_basis(g.b);
        }
        noise.fill(z);
        x = step_with_frames(x, t, g, frame_a, frame_b, dt, z, spec);
        t = t0 + (step + 1) * dt;
        if (!x.allFinite())
            throw DivergenceError("simulate: non-finite state at step " +
                                  std::to_string(step + 1));
        if (record_path) {
            traj.times.push_back(t);
            traj.states.push_back(x);
            traj.controls.push_back(g);
        }
    }
    traj.payoff = std::exp(-spec.r * span) * spec.payoff.evaluate(x);
    if (!record_path) {
        traj.times = {t0, spec.T};
        traj.states = {x0, x};
    }
    return traj;
}

MonteCarloResult monte_carlo_value(const Policy& policy_min,
                                   const Policy& policy_max,
                                   const Eigen::VectorXd& x0, double t0,
                                   std::int64_t n_paths, double dt,
                                   int epoch_steps, std::uint64_t master_seed,
                                   const ProblemSpec& spec) {
    if (n_paths < 2)
        throw std::invalid_argument("monte_carlo_value: need at least 2 paths");
    std::vector<double> payoffs(n_paths);
    for (std::int64_t i = 0; i < n_paths; ++i) {
        NormalStream stream(master_seed, static_cast<std::uint64_t>(i));
        try {
            payoffs[i] = simulate(policy_min, policy_max, x0, t0, dt, epoch_steps,
                                  stream, spec, /*record_path=*/false)
                             .payoff;
        } catch (const DivergenceError& e) {
            throw DivergenceError("path " + std::to_string(i) + ": " + e.what());
        }
    }
    // Fixed-order reduction keeps results independent of scheduling.
    double sum = 0.0;
    for (double v : payoffs) sum += v;
    const double mean = sum / static_cast<double>(n_paths);
    double ss = 0.0;
    for (double v : payoffs) ss += (v - mean) * (v - mean);
    const double variance = ss / static_cast<double>(n_paths - 1);
    MonteCarloResult res;
    res.mean = mean;
    res.stderr_of_mean = std::sqrt(variance / static_cast<double>(n_paths));
    res.n_paths = n_paths;
    res.master_seed = master_seed;
    return res;
}

} // namespace towlab
