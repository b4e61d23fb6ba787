#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "towlab/core/fields.hpp"
#include "towlab/core/problem.hpp"
#include "towlab/operators/action.hpp"
#include "towlab/operators/operators.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

using namespace towlab;

namespace {

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

ProblemSpec simple_spec(int n, double p0, Eigen::VectorXd mu, double r) {
    ProblemSpec spec;
    spec.n = n;
    spec.T = 1.0;
    spec.mu = std::move(mu);
    spec.r = r;
    spec.p_field = constant_exponent(p0);
    spec.payoff = gaussian_bump_payoff(0.7, 1.0, Eigen::VectorXd::Zero(n), 0.05);
    spec.lipschitz_g = 1.0;
    return spec;
}

Eigen::VectorXd random_unit(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g;
    Eigen::VectorXd v(n);
    do {
        for (int k = 0; k < n; ++k) v[k] = g(rng);
    } while (v.norm() < 1e-6);
    return v.normalized();
}

Eigen::MatrixXd random_symmetric(std::mt19937_64& rng, int n, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Eigen::MatrixXd s(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            s(i, j) = u(rng);
            s(j, i) = s(i, j);
        }
    return s;
}

// Independent reference for the Isaacs operators: explicit loops over the
// augmented direction set and both intensity endpoints, using phi().
struct BruteIsaacs {
    double lower = 0.0;
    double upper = 0.0;
    Eigen::VectorXd lower_dir;
    double lower_intensity = 0.0;
};

BruteIsaacs brute_isaacs(const ActionGrid& grid, const Eigen::VectorXd& x,
                         double t, const SecondOrderData& data,
                         const ProblemSpec& spec) {
    std::vector<Eigen::VectorXd> dirs = grid.directions();
    if (data.nu.norm() > 0.0) {
        dirs.push_back(data.nu.normalized());
        dirs.push_back(-data.nu.normalized());
    }
    const std::vector<double> intensities = {0.0, grid.intensity_bound()};
    const double rterm = spec.r * data.xi;

    BruteIsaacs out;
    double best_lower = std::numeric_limits<double>::infinity();
    for (const auto& a : dirs)
        for (double c : intensities) {
            double inner = -std::numeric_limits<double>::infinity();
            for (const auto& b : dirs)
                for (double d : intensities)
                    inner = std::max(inner, phi(a, b, c, d, x, t, data, spec));
            if (inner < best_lower) {
                best_lower = inner;
                out.lower_dir = a;
                out.lower_intensity = c;
            }
        }
    out.lower = best_lower + rterm;

    double best_upper = -std::numeric_limits<double>::infinity();
    for (const auto& b : dirs)
        for (double d : intensities) {
            double inner = std::numeric_limits<double>::infinity();
            for (const auto& a : dirs)
                for (double c : intensities)
                    inner = std::min(inner, phi(a, b, c, d, x, t, data, spec));
            best_upper = std::max(best_upper, inner);
        }
    out.upper = best_upper + rterm;
    return out;
}

} // namespace

TEST_CASE("diffusion matrix at p = 2 is the identity") {
    const Eigen::VectorXd e1 = vec2(1.0, 0.0);
    CHECK((diffusion_matrix(e1, e1, 2.0) - Eigen::MatrixXd::Identity(2, 2))
              .cwiseAbs()
              .maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("diffusion matrix forced arithmetic example") {
    const Eigen::VectorXd e1 = vec2(1.0, 0.0);
    const Eigen::MatrixXd a = diffusion_matrix(e1, e1, 3.0);
    CHECK(a(0, 0) == doctest::Approx(2.0));
    CHECK(a(1, 1) == doctest::Approx(1.0));
    CHECK(a(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("diffusion matrix eigenvalues stay inside [min(1,p-1), max(1,p-1)]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> up(1.2, 5.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = trial % 2 == 0 ? 2 : 3;
        const double p = up(rng);
        const Eigen::MatrixXd a =
            diffusion_matrix(random_unit(rng, n), random_unit(rng, n), p);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
        CHECK(eig.eigenvalues().minCoeff() >= std::min(1.0, p - 1.0) - 1e-12);
        CHECK(eig.eigenvalues().maxCoeff() <= std::max(1.0, p - 1.0) + 1e-12);
    }
}

TEST_CASE("diffusion matrix rejects non-unit inputs") {
    CHECK_THROWS_AS((void)diffusion_matrix(vec2(1.0, 0.5), vec2(1.0, 0.0), 2.0),
                    std::invalid_argument);
}

TEST_CASE("sigma at p = 2 has sigma sigma^T = 2 I") {
    std::mt19937_64 rng(13);
    const Eigen::VectorXd a = random_unit(rng, 2);
    const Eigen::VectorXd b = random_unit(rng, 2);
    const Eigen::MatrixXd s = sigma_matrix(a, b, 2.0);
    CHECK((s * s.transpose() - 2.0 * Eigen::MatrixXd::Identity(2, 2))
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
}

TEST_CASE("sigma hand example: orthogonal directions at p = 3") {
    const Eigen::MatrixXd s = sigma_matrix(vec2(1.0, 0.0), vec2(0.0, 1.0), 3.0);
    const Eigen::MatrixXd half = 0.5 * s * s.transpose();
    CHECK(half(0, 0) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(half(1, 1) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(std::abs(half(0, 1)) <= 1e-12);
}

TEST_CASE("generator identity: half sigma sigma^T equals the diffusion matrix") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> up(1.2, 5.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 2 + trial % 3;
        const double p = up(rng);
        const Eigen::VectorXd a = random_unit(rng, n);
        const Eigen::VectorXd b = random_unit(rng, n);
        const Eigen::MatrixXd s = sigma_matrix(a, b, p);
        const Eigen::MatrixXd diff = 0.5 * s * s.transpose() - diffusion_matrix(a, b, p);
        CHECK(diff.cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("sigma rejects p <= 1") {
    CHECK_THROWS_AS((void)sigma_matrix(vec2(1, 0), vec2(0, 1), 1.0), std::domain_error);
}

TEST_CASE("phi trivial examples") {
    const ProblemSpec spec = simple_spec(2, 3.0, Eigen::VectorXd::Zero(2), 0.0);
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
    const Eigen::VectorXd e1 = vec2(1.0, 0.0);
    const Eigen::VectorXd e2 = vec2(0.0, 1.0);

    SecondOrderData flat{0.4, Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Zero(2, 2)};
    CHECK(phi(e1, e2, 1.7, 0.3, x, 0.2, flat, spec) == doctest::Approx(0.0));

    SecondOrderData curved{0.0, Eigen::VectorXd::Zero(2),
                           Eigen::MatrixXd::Identity(2, 2)};
    CHECK(phi(e1, e2, 5.0, 2.0, x, 0.1, curved, spec) == doctest::Approx(-3.0));

    SecondOrderData sloped{0.0, e1, Eigen::MatrixXd::Zero(2, 2)};
    CHECK(phi(e1, e1, 1.0, 1.0, x, 0.0, sloped, spec) == doctest::Approx(-4.0));
}

TEST_CASE("isaacs kills the drift term exactly when the gradient is on the grid") {
    const ProblemSpec spec = simple_spec(2, 2.0, Eigen::VectorXd::Zero(2), 0.0);
    const ActionGrid grid = ActionGrid::make(2, 16, 10.0);
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        SecondOrderData data{0.0, random_unit(rng, 2) * (0.2 + trial * 0.1),
                             Eigen::MatrixXd::Zero(2, 2)};
        CHECK(isaacs_lower(grid, Eigen::VectorXd::Zero(2), 0.3, data, spec) == 0.0);
    }
}

TEST_CASE("isaacs reduces to r xi when all data vanish") {
    const ProblemSpec spec = simple_spec(2, 3.0, Eigen::VectorXd::Zero(2), 0.7);
    const ActionGrid grid = ActionGrid::make(2, 16, 5.0);
    SecondOrderData data{0.6, Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Zero(2, 2)};
    CHECK(isaacs_lower(grid, Eigen::VectorXd::Zero(2), 0.0, data, spec) ==
          doctest::Approx(0.7 * 0.6));
    CHECK(isaacs_upper(grid, Eigen::VectorXd::Zero(2), 0.0, data, spec) ==
          doctest::Approx(0.7 * 0.6));
}

TEST_CASE("fast isaacs evaluators agree with the brute-force oracle") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> up(1.3, 4.5);
    std::uniform_real_distribution<double> uu(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = trial % 4 == 3 ? 3 : 2;
        const double m = trial % 3 == 0 ? 1.0 : 7.5;
        ProblemSpec spec = simple_spec(n, up(rng), Eigen::VectorXd::Zero(n), 0.13);
        for (int k = 0; k < n; ++k) spec.mu[k] = uu(rng);
        const ActionGrid grid = ActionGrid::make(n, n == 2 ? 16 : 32, m);
        SecondOrderData data;
        data.xi = uu(rng);
        data.hessian = random_symmetric(rng, n, 1.5);
        if (trial % 5 == 0)
            data.nu = Eigen::VectorXd::Zero(n);
        else
            data.nu = random_unit(rng, n) * std::abs(uu(rng)) * 2.0;
        const Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        const double t = 0.4;

        const BruteIsaacs ref = brute_isaacs(grid, x, t, data, spec);
        const double lo = isaacs_lower(grid, x, t, data, spec);
        const double hi = isaacs_upper(grid, x, t, data, spec);
        const double scale = 1.0 + std::abs(ref.lower) + std::abs(ref.upper);
        CHECK(std::abs(lo - ref.lower) <= 1e-12 * scale);
        CHECK(std::abs(hi - ref.upper) <= 1e-12 * scale);
        CHECK(lo >= hi - 1e-12 * scale); // inf-sup dominates sup-inf
    }
}

TEST_CASE("argmin control matches the brute-force minimizer") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> uu(-1.0, 1.0);
    const ProblemSpec spec = simple_spec(2, 3.2, vec2(0.1, -0.3), 0.05);
    const ActionGrid grid = ActionGrid::make(2, 16, 4.0);
    for (int trial = 0; trial < 100; ++trial) {
        SecondOrderData data;
        data.xi = uu(rng);
        data.hessian = random_symmetric(rng, 2, 1.0);
        data.nu = random_unit(rng, 2) * (0.1 + std::abs(uu(rng)));
        double packed[3];
        pack_upper(data.hessian, packed);
        const double p_val = 3.2;
        const Control fast =
            isaacs_lower_argmin(grid, p_val, data.nu.data(), packed);
        const BruteIsaacs ref =
            brute_isaacs(grid, Eigen::VectorXd::Zero(2), 0.0, data, spec);
        // The chosen control must achieve the brute optimum.
        double inner = -std::numeric_limits<double>::infinity();
        std::vector<Eigen::VectorXd> dirs = grid.directions();
        dirs.push_back(data.nu.normalized());
        dirs.push_back(-data.nu.normalized());
        for (const auto& b : dirs)
            for (double d : {0.0, grid.intensity_bound()})
                inner = std::max(inner, phi(fast.direction, b, fast.intensity, d,
                                            Eigen::VectorXd::Zero(2), 0.0, data,
                                            spec));
        CHECK(inner + spec.r * data.xi ==
              doctest::Approx(ref.lower).epsilon(1e-10));
        CHECK(std::abs(fast.direction.norm() - 1.0) <= 1e-12);
        CHECK(fast.intensity <= grid.intensity_bound());
    }
}

TEST_CASE("greedy minimizer picks the gradient direction when the hessian vanishes") {
    const ProblemSpec spec = simple_spec(2, 3.0, Eigen::VectorXd::Zero(2), 0.0);
    (void)spec;
    const ActionGrid grid = ActionGrid::make(2, 16, 10.0);
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::VectorXd nu = random_unit(rng, 2) * 0.8;
        double packed[3] = {0.0, 0.0, 0.0};
        const Control c = isaacs_lower_argmin(grid, 3.0, nu.data(), packed);
        CHECK(c.direction.dot(nu.normalized()) == doctest::Approx(1.0));
        // Intensity ties break to zero.
        CHECK(c.intensity == 0.0);
    }
}

TEST_CASE("degenerate ellipticity in the hessian argument") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> uu(-1.0, 1.0);
    const ProblemSpec spec = simple_spec(2, 2.7, vec2(0.2, 0.0), 0.1);
    const ActionGrid grid = ActionGrid::make(2, 16, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        SecondOrderData d1;
        d1.xi = 0.3;
        d1.nu = random_unit(rng, 2) * (0.5 + std::abs(uu(rng)));
        d1.hessian = random_symmetric(rng, 2, 1.0);
        // Positive semidefinite bump.
        const Eigen::VectorXd w = random_unit(rng, 2) * std::abs(uu(rng));
        SecondOrderData d2 = d1;
        d2.hessian += w * w.transpose();

        const Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
        CHECK(isaacs_lower(grid, x, 0.1, d2, spec) <=
              isaacs_lower(grid, x, 0.1, d1, spec) + 1e-12);
        CHECK(f_limit(x, 0.1, d1, spec) <= f_limit(x, 0.1, d2, spec) + 1e-12);
    }
}

TEST_CASE("key inequality holds for all unit perturbations") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> uu(-3.0, 3.0);
    for (int trial = 0; trial < 10000; ++trial) {
        const int n = trial % 2 == 0 ? 2 : 3;
        Eigen::VectorXd nu(n);
        do {
            for (int k = 0; k < n; ++k) nu[k] = uu(rng);
        } while (nu.norm() < 1e-9);
        const Eigen::VectorXd w = random_unit(rng, n);
        CHECK((nu.normalized() + w).dot(nu) >= -1e-12);
    }
}

TEST_CASE("f_limit examples") {
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
    {
        // Laplacian case p = 2.
        std::mt19937_64 rng(1);
        const ProblemSpec spec = simple_spec(2, 2.0, vec2(0.4, -0.2), 0.3);
        SecondOrderData data{0.5, vec2(1.0, 2.0), random_symmetric(rng, 2, 1.0)};
        const double expected =
            data.hessian.trace() + spec.mu.dot(data.nu) - spec.r * data.xi;
        CHECK(f_limit(x, 0.2, data, spec) == doctest::Approx(expected));
    }
    {
        const ProblemSpec spec = simple_spec(2, 4.0, Eigen::VectorXd::Zero(2), 0.0);
        Eigen::MatrixXd m(2, 2);
        m << 2.0, 0.0, 0.0, -1.0;
        SecondOrderData data{0.0, vec2(1.0, 0.0), m};
        CHECK(f_limit(x, 0.0, data, spec) == doctest::Approx(5.0));
    }
    {
        const ProblemSpec spec = simple_spec(2, 3.0, Eigen::VectorXd::Zero(2), 0.0);
        SecondOrderData data{0.0, Eigen::VectorXd::Zero(2),
                             Eigen::MatrixXd::Identity(2, 2)};
        CHECK_THROWS_AS((void)f_limit(x, 0.0, data, spec), std::domain_error);
    }
}

TEST_CASE("envelopes at vanishing gradient, against an angular sweep") {
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
    {
        const ProblemSpec spec = simple_spec(2, 3.0, Eigen::VectorXd::Zero(2), 0.8);
        SecondOrderData data{0.5, Eigen::VectorXd::Zero(2),
                             Eigen::MatrixXd::Zero(2, 2)};
        const auto [lo, hi] = f_envelopes(x, 0.1, data, spec);
        CHECK(lo == doctest::Approx(-0.4));
        CHECK(hi == doctest::Approx(-0.4));
    }
    {
        const ProblemSpec spec = simple_spec(2, 3.0, Eigen::VectorXd::Zero(2), 0.0);
        Eigen::MatrixXd m(2, 2);
        m << 1.0, 0.0, 0.0, -2.0;
        SecondOrderData data{0.0, Eigen::VectorXd::Zero(2), m};
        const auto [lo, hi] = f_envelopes(x, 0.0, data, spec);
        CHECK(lo == doctest::Approx(-3.0));
        CHECK(hi == doctest::Approx(0.0));

        // Independent oracle: minimize/maximize over a fine angular grid.
        double sweep_lo = 1e300, sweep_hi = -1e300;
        for (int k = 0; k < 4096; ++k) {
            const double th = 2.0 * std::numbers::pi * k / 4096.0;
            const Eigen::VectorXd w = vec2(std::cos(th), std::sin(th));
            const double val = m.trace() + (3.0 - 2.0) * w.dot(m * w);
            sweep_lo = std::min(sweep_lo, val);
            sweep_hi = std::max(sweep_hi, val);
        }
        CHECK(lo == doctest::Approx(sweep_lo).epsilon(1e-6));
        CHECK(hi == doctest::Approx(sweep_hi).epsilon(1e-6));
    }
    {
        // The envelope gap closes at p = 2.
        std::mt19937_64 rng(47);
        const ProblemSpec spec = simple_spec(2, 2.0, Eigen::VectorXd::Zero(2), 0.25);
        SecondOrderData data{0.3, Eigen::VectorXd::Zero(2),
                             random_symmetric(rng, 2, 2.0)};
        const auto [lo, hi] = f_envelopes(x, 0.5, data, spec);
        const double expected = data.hessian.trace() - 0.25 * 0.3;
        CHECK(lo == doctest::Approx(expected));
        CHECK(hi == doctest::Approx(expected));
    }
    {
        const ProblemSpec spec = simple_spec(2, 3.0, Eigen::VectorXd::Zero(2), 0.0);
        SecondOrderData data{0.0, vec2(0.1, 0.0), Eigen::MatrixXd::Zero(2, 2)};
        CHECK_THROWS_AS((void)f_envelopes(x, 0.0, data, spec), std::domain_error);
    }
}

TEST_CASE("pucci examples and duality") {
    {
        const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
        CHECK(pucci(m, 0.5, 2.0, PucciSign::plus) == doctest::Approx(4.0));
        CHECK(pucci(m, 0.5, 2.0, PucciSign::minus) == doctest::Approx(1.0));
    }
    {
        Eigen::MatrixXd m(2, 2);
        m << 1.0, 0.0, 0.0, -1.0;
        CHECK(pucci(m, 0.5, 2.0, PucciSign::plus) == doctest::Approx(1.5));
    }
    CHECK_THROWS_AS((void)pucci(Eigen::MatrixXd::Identity(2, 2), 0.0, 1.0,
                                PucciSign::plus),
                    std::domain_error);

    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = trial % 2 == 0 ? 2 : 3;
        const Eigen::MatrixXd m = random_symmetric(rng, n, 2.0);
        CHECK(pucci(-m, 0.5, 2.0, PucciSign::plus) ==
              doctest::Approx(-pucci(m, 0.5, 2.0, PucciSign::minus)));
    }
}

TEST_CASE("pucci dominates sampled matrices with pinched spectra") {
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> ul(0.5, 2.0);
    const Eigen::MatrixXd m = random_symmetric(rng, 3, 1.5);
    const double p_plus = pucci(m, 0.5, 2.0, PucciSign::plus);
    const double p_minus = pucci(m, 0.5, 2.0, PucciSign::minus);
    double seen_max = -1e300, seen_min = 1e300;
    for (int trial = 0; trial < 4000; ++trial) {
        // Random A = Q diag(lam) Q^T with eigenvalues in [0.5, 2].
        const Eigen::MatrixXd raw = random_symmetric(rng, 3, 1.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(raw);
        Eigen::VectorXd lam(3);
        for (int k = 0; k < 3; ++k) lam[k] = ul(rng);
        const Eigen::MatrixXd a = eig.eigenvectors() * lam.asDiagonal() *
                                  eig.eigenvectors().transpose();
        const double tr = (a * m).trace();
        CHECK(tr <= p_plus + 1e-12);
        CHECK(tr >= p_minus - 1e-12);
        seen_max = std::max(seen_max, tr);
        seen_min = std::min(seen_min, tr);
    }
    // The sampled extremes should come close to the Pucci values.
    CHECK(seen_max >= p_plus - 0.15 * (std::abs(p_plus) + 1.0));
    CHECK(seen_min <= p_minus + 0.15 * (std::abs(p_minus) + 1.0));
}

TEST_CASE("pucci operators sandwich the limit operator") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> uu(-1.0, 1.0);
    const ProblemSpec spec = simple_spec(2, 3.0, vec2(0.3, -0.1), 0.2);
    ProblemSpec varying = spec;
    varying.p_field = sinusoidal_exponent(3.0, 0.5);
    const double lam = std::min(1.0, varying.p_field.p_min - 1.0);
    const double big = std::max(1.0, varying.p_field.p_max - 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        SecondOrderData data;
        data.xi = uu(rng);
        data.nu = random_unit(rng, 2) * (0.2 + std::abs(uu(rng)));
        data.hessian = random_symmetric(rng, 2, 1.5);
        const Eigen::VectorXd x = vec2(uu(rng) * 2.0, uu(rng) * 2.0);
        const double t = 0.5 + 0.4 * uu(rng);
        const double f = f_limit(x, t, data, varying);
        const double shift = varying.mu.dot(data.nu) - varying.r * data.xi;
        CHECK(f >= pucci(data.hessian, lam, big, PucciSign::minus) + shift - 1e-12);
        CHECK(f <= pucci(data.hessian, lam, big, PucciSign::plus) + shift + 1e-12);
    }
}

TEST_CASE("operator converges to the limit as the intensity bound grows") {
    std::mt19937_64 rng(67);
    const ProblemSpec spec = simple_spec(2, 3.4, vec2(0.1, 0.2), 0.05);
    SecondOrderData data;
    data.xi = 0.4;
    data.nu = vec2(0.9, -0.5);
    data.hessian = random_symmetric(rng, 2, 0.7);
    const Eigen::VectorXd x = vec2(0.3, 0.3);
    const double limit = f_limit(x, 0.6, data, spec);
    // Nonincreasing up to the direction-grid wobble C^2/(m |nu|): the
    // signed error can cross zero, so raw |.| monotonicity can fail at
    // that scale.
    const double c_env = (3.4 - 2.0) * data.hessian.operatorNorm();
    double prev = 1e300;
    for (double m : {10.0, 100.0, 1000.0}) {
        const ActionGrid grid = ActionGrid::make(2, 256, m);
        const double disc = std::abs(isaacs_lower(grid, x, 0.6, data, spec) + limit);
        CHECK(disc <= prev + c_env * c_env / (m * data.nu.norm()) + 1e-9);
        prev = disc;
    }
    CHECK(prev <= 1e-3);
}

TEST_CASE("second order data must be symmetric") {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 0.5, -0.5, 1.0;
    SecondOrderData data{0.0, Eigen::VectorXd::Zero(2), m};
    CHECK_THROWS_AS(check_second_order(data), std::invalid_argument);
}

TEST_CASE("action grids are unit and closed under negation") {
    for (int n : {2, 3, 4}) {
        const ActionGrid grid = ActionGrid::make(n, n == 2 ? 16 : 32, 2.0);
        const int d = grid.size();
        for (int j = 0; j < d; ++j) {
            CHECK(std::abs(grid.directions()[j].norm() - 1.0) <= 1e-12);
            const Eigen::VectorXd sum =
                grid.directions()[j] + grid.directions()[(j + d / 2) % d];
            CHECK(sum.cwiseAbs().maxCoeff() == 0.0);
        }
    }
    CHECK_THROWS_AS((void)ActionGrid::make(2, 15, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)ActionGrid::make(2, 16, 0.0), std::invalid_argument);
}
