#include "openbilliard/scaling.hpp"

#include "openbilliard/errors.hpp"

#include <cmath>

namespace ob {

namespace {

// sigma and its derivatives on the open interval (0, 1)
double sigma_raw(double t) { return t * t * t * t * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t))); }
double dsigma_raw(double t) { return 140.0 * t * t * t * (1 - t) * (1 - t) * (1 - t); }
double d2sigma_raw(double t) { return 420.0 * t * t * (1 - t) * (1 - t) * (1 - 2 * t); }
// integral of sigma from 0 to t, S(1) = 1/2
double int_sigma_raw(double t) { return t * t * t * t * t * (7.0 + t * (-14.0 + t * (10.0 - 2.5 * t))); }

} // namespace

double smoothstep7(double t)
{
    if (t <= 0)
        return 0.0;
    if (t >= 1)
        return 1.0;
    return sigma_raw(t);
}

ScalingMap make_scaling_map(cdouble theta, double x0, double d)
{
    if (!(theta.real() > 0))
        throw InvalidTheta("Re(theta) must be positive");
    if (!(d > 0))
        throw InvalidTheta("transition width must be positive");
    ScalingMap map;
    map.theta_ = theta;
    map.x0_ = x0;
    map.d_ = d;
    return map;
}

ScalingMap make_rotation_map(double alpha, double x0, double d)
{
    return make_scaling_map(std::polar(1.0, alpha), x0, d);
}

cdouble ScalingMap::g(double x) const
{
    const double t = (x0_ - x) / d_;
    if (t <= 0)
        return x;
    const double integral = t >= 1 ? 0.5 + (t - 1) : int_sigma_raw(t);
    return x - (theta_ - 1.0) * d_ * integral;
}

cdouble ScalingMap::gp(double x) const
{
    return 1.0 + (theta_ - 1.0) * smoothstep7((x0_ - x) / d_);
}

cdouble ScalingMap::gpp(double x) const
{
    const double t = (x0_ - x) / d_;
    if (t <= 0 || t >= 1)
        return 0.0;
    return -(theta_ - 1.0) * dsigma_raw(t) / d_;
}

cdouble ScalingMap::gppp(double x) const
{
    const double t = (x0_ - x) / d_;
    if (t <= 0 || t >= 1)
        return 0.0;
    return (theta_ - 1.0) * d2sigma_raw(t) / (d_ * d_);
}

ScaledCoefficients ScalingMap::coefficients(double x) const
{
    const double t = (x0_ - x) / d_;
    if (t <= 0)
        return {1.0, 0.0};
    if (t >= 1)
        return {1.0 / (theta_ * theta_), 0.0};
    const cdouble g1 = gp(x), g2 = gpp(x), g3 = gppp(x);
    const cdouble g1sq = g1 * g1;
    return {1.0 / g1sq, (2.0 * g1 * g3 - 5.0 * g2 * g2) / (4.0 * g1sq * g1sq)};
}

} // namespace ob
