#include "towlab/core/problem.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>

namespace towlab {
namespace {

// Deterministic probe sampler (splitmix64 -> uniform doubles).
class ProbeRng {
public:
    explicit ProbeRng(std::uint64_t seed) : state_(seed) {}
    double uniform() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        z = z ^ (z >> 31);
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

constexpr double kProbeRadius = 8.0;
constexpr int kProbeCount = 10000;
constexpr double kProbeTol = 1e-9;

Eigen::VectorXd sample_point(ProbeRng& rng, int n) {
    Eigen::VectorXd x(n);
    for (int k = 0; k < n; ++k) x[k] = rng.uniform(-kProbeRadius, kProbeRadius);
    return x;
}

} // namespace

std::vector<std::string> validate_spec(const ProblemSpec& spec) {
    std::vector<std::string> violations;
    auto add = [&](const std::string& s) { violations.push_back(s); };

    if (spec.n < 2) add("n must be at least 2");
    if (!(spec.T > 0.0)) add("T must be positive");
    if (spec.r < 0.0) add("r must be nonnegative");
    if (!(spec.lipschitz_g > 0.0)) add("lipschitz_g must be positive");
    if (spec.mu.size() != spec.n) add("mu dimension does not match n");
    if (!spec.p_field.evaluate) add("p_field has no evaluator");
    if (!spec.payoff.evaluate) add("payoff has no evaluator");
    if (!violations.empty()) return violations;

    if (!(spec.p_field.p_min > 1.0)) add("p_min must exceed 1");
    if (spec.p_field.p_max < spec.p_field.p_min) add("p_max below p_min");
    if (spec.p_field.lipschitz_p < 0.0) add("lipschitz_p must be nonnegative");
    if (!violations.empty()) return violations;

    ProbeRng rng(0x70776C61u); // fixed probe seed

    // Exponent field: range and Lipschitz probes.
    bool p_range_ok = true, p_lip_ok = true;
    for (int i = 0; i < kProbeCount; ++i) {
        const Eigen::VectorXd x = sample_point(rng, spec.n);
        const Eigen::VectorXd y = sample_point(rng, spec.n);
        const double t = rng.uniform(0.0, spec.T);
        const double s = rng.uniform(0.0, spec.T);
        const double px = spec.p_field.evaluate(x, t);
        const double py = spec.p_field.evaluate(y, s);
        if (px < spec.p_field.p_min - kProbeTol || px > spec.p_field.p_max + kProbeTol)
            p_range_ok = false;
        const double dist = std::sqrt((x - y).squaredNorm() + (t - s) * (t - s));
        if (std::abs(px - py) > spec.p_field.lipschitz_p * dist + kProbeTol)
            p_lip_ok = false;
        if (!p_range_ok && !p_lip_ok) break;
    }
    if (!p_range_ok) add("p_field leaves [p_min, p_max] on probe points");
    if (!p_lip_ok) add("p_field violates declared lipschitz_p on probe pairs");

    // Payoff: positivity, boundedness, Lipschitz probes.
    bool g_pos_ok = true, g_bound_ok = true, g_lip_ok = true;
    for (int i = 0; i < kProbeCount; ++i) {
        const Eigen::VectorXd x = sample_point(rng, spec.n);
        const Eigen::VectorXd y = sample_point(rng, spec.n);
        const double gx = spec.payoff.evaluate(x);
        const double gy = spec.payoff.evaluate(y);
        if (!(gx > 0.0)) g_pos_ok = false;
        if (gx > spec.lipschitz_g + kProbeTol) g_bound_ok = false;
        const double d = (x - y).norm();
        if (d > 0.0 && std::abs(gx - gy) > spec.lipschitz_g * d + kProbeTol)
            g_lip_ok = false;
    }
    if (!g_pos_ok) add("payoff not strictly positive");
    if (!g_bound_ok) add("payoff not bounded by L_g");
    if (!g_lip_ok) add("payoff violates Lipschitz bound L_g");

    // Declared payoff bounds must themselves respect L_g.
    if (spec.payoff.sup_bound > spec.lipschitz_g + kProbeTol)
        add("payoff not bounded by L_g");
    if (spec.payoff.lipschitz_bound > spec.lipschitz_g + kProbeTol)
        add("payoff violates Lipschitz bound L_g");

    // Deduplicate consecutive repeats (declared vs probed can coincide).
    std::vector<std::string> out;
    for (const auto& v : violations)
        if (out.empty() || out.back() != v) out.push_back(v);
    return out;
}

} // namespace towlab
