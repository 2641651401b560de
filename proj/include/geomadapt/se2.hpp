#pragma once

#include <span>

namespace geomadapt {

/// Planar rigid-body pose. Heading is kept in (-pi, pi].
struct GroupElement {
  double x{0.0};
  double y{0.0};
  double theta{0.0};
};

/// Body-frame velocity (longitudinal, lateral, angular).
struct BodyVelocity {
  double xi_x{0.0};
  double xi_y{0.0};
  double xi_theta{0.0};

  BodyVelocity operator+(const BodyVelocity& o) const {
    return {xi_x + o.xi_x, xi_y + o.xi_y, xi_theta + o.xi_theta};
  }
  BodyVelocity operator-(const BodyVelocity& o) const {
    return {xi_x - o.xi_x, xi_y - o.xi_y, xi_theta - o.xi_theta};
  }
  BodyVelocity operator*(double s) const { return {xi_x * s, xi_y * s, xi_theta * s}; }
  double operator[](int k) const { return k == 0 ? xi_x : (k == 1 ? xi_y : xi_theta); }
  double& operator[](int k) { return k == 0 ? xi_x : (k == 1 ? xi_y : xi_theta); }
};

double norm(const BodyVelocity& v);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

GroupElement compose(const GroupElement& g, const GroupElement& h);
GroupElement inverse(const GroupElement& g);

/// Below this |xi_theta * dt| the straight-line series branch is used.
inline constexpr double kSmallAngle = 1e-8;

/// Pose reached by flowing a constant body velocity for `dt`.
GroupElement exp(const BodyVelocity& xi, double dt);

/// Left-composes per-step exponentials: g_{n+1} = g_n * exp(xi_n, dt).
GroupElement integrate_trajectory(const GroupElement& g0, std::span<const BodyVelocity> xi_series,
                                  double dt);

/// Lie bracket [a, b] of se(2) elements.
BodyVelocity bracket(const BodyVelocity& a, const BodyVelocity& b);

}  // namespace geomadapt
