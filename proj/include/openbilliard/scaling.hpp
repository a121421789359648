#pragma once

#include <complex>

namespace ob {

using cdouble = std::complex<double>;

/// Degree-7 smoothstep 35t^4 - 84t^5 + 70t^6 - 20t^7, clamped to [0, 1].
/// Its first three derivatives vanish at both ends.
double smoothstep7(double t);

struct ScaledCoefficients {
    cdouble inv_gp2;          // 1 / g'^2
    cdouble extra_potential;  // (2 g' g''' - 5 g''^2) / (4 g'^4)
};

/// Exterior complex scaling profile. g is the identity for x >= x0 and a
/// rotation by theta for x <= x0 - d, blended by a smoothstep in g'.
class ScalingMap {
public:
    cdouble theta() const { return theta_; }
    double anchor() const { return x0_; }
    double transition_width() const { return d_; }

    cdouble g(double x) const;
    cdouble gp(double x) const;
    cdouble gpp(double x) const;
    cdouble gppp(double x) const;

    ScaledCoefficients coefficients(double x) const;

    friend ScalingMap make_scaling_map(cdouble theta, double x0, double d);

private:
    cdouble theta_{1.0, 0.0};
    double x0_ = 0.0;
    double d_ = 1.0;
};

/// Throws InvalidTheta if Re(theta) <= 0 or d <= 0.
ScalingMap make_scaling_map(cdouble theta, double x0, double d);

/// theta = exp(i alpha).
ScalingMap make_rotation_map(double alpha, double x0, double d);

inline ScaledCoefficients scaled_coefficients(const ScalingMap& map, double x) { return map.coefficients(x); }

} // namespace ob
