#include "towlab/core/fields.hpp"

#include <cmath>
#include <stdexcept>

namespace towlab {

ExponentField constant_exponent(double p0) {
    if (p0 <= 1.0)
        throw std::invalid_argument("constant_exponent: p0 must exceed 1");
    ExponentField f;
    f.evaluate = [p0](const Eigen::VectorXd&, double) { return p0; };
    f.p_min = p0;
    f.p_max = p0;
    f.lipschitz_p = 0.0;
    f.name = "constant";
    f.params = {{"p0", p0}};
    return f;
}

ExponentField sinusoidal_exponent(double base, double amp) {
    if (amp < 0.0 || base - amp <= 1.0)
        throw std::invalid_argument("sinusoidal_exponent: need base - amp > 1");
    ExponentField f;
    f.evaluate = [base, amp](const Eigen::VectorXd& x, double t) {
        return base + amp * std::sin(x[0]) * std::cos(t);
    };
    f.p_min = base - amp;
    f.p_max = base + amp;
    // |grad_x p| <= amp, |dp/dt| <= amp, so the parabolic-metric constant
    // is amp * sqrt(2).
    f.lipschitz_p = amp * std::sqrt(2.0);
    f.name = "sinusoidal";
    f.params = {{"base", base}, {"amp", amp}};
    return f;
}

PayoffField gaussian_bump_payoff(double amp, double width,
                                 const Eigen::VectorXd& center,
                                 double floor_value) {
    if (amp <= 0.0 || width <= 0.0 || floor_value < 0.0)
        throw std::invalid_argument("gaussian_bump_payoff: bad parameters");
    PayoffField g;
    Eigen::VectorXd c = center;
    g.evaluate = [amp, width, c, floor_value](const Eigen::VectorXd& x) {
        return floor_value + amp * std::exp(-(x - c).squaredNorm() / (2.0 * width * width));
    };
    g.sup_bound = floor_value + amp;
    // max of |g'| along a ray: amp * e^{-1/2} / width
    g.lipschitz_bound = amp * std::exp(-0.5) / width;
    g.name = "gaussian_bump";
    g.params = {{"amp", amp}, {"width", width}, {"floor", floor_value}};
    g.center = c;
    return g;
}

PayoffField smoothed_cone_payoff(double amp, double radius, double smoothing,
                                 const Eigen::VectorXd& center,
                                 double floor_value) {
    if (amp <= 0.0 || radius <= 0.0 || smoothing < 0.0 || floor_value <= 0.0)
        throw std::invalid_argument("smoothed_cone_payoff: bad parameters");
    PayoffField g;
    Eigen::VectorXd c = center;
    g.evaluate = [amp, radius, smoothing, c, floor_value](const Eigen::VectorXd& x) {
        const double d = std::sqrt((x - c).squaredNorm() + smoothing * smoothing);
        return floor_value + amp * std::max(0.0, 1.0 - d / radius);
    };
    g.sup_bound = floor_value + amp * std::max(0.0, 1.0 - smoothing / radius);
    g.lipschitz_bound = amp / radius;
    g.name = "smoothed_cone";
    g.params = {{"amp", amp}, {"radius", radius}, {"smoothing", smoothing},
                {"floor", floor_value}};
    g.center = c;
    return g;
}

PayoffField constant_payoff(double value, int n) {
    if (value <= 0.0)
        throw std::invalid_argument("constant_payoff: value must be positive");
    PayoffField g;
    g.evaluate = [value](const Eigen::VectorXd&) { return value; };
    g.sup_bound = value;
    g.lipschitz_bound = 0.0;
    g.name = "constant";
    g.params = {{"value", value}};
    g.center = Eigen::VectorXd::Zero(n);
    return g;
}

} // namespace towlab
