#include "geomadapt/se2.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace geomadapt {

double norm(const BodyVelocity& v) {
  return std::sqrt(v.xi_x * v.xi_x + v.xi_y * v.xi_y + v.xi_theta * v.xi_theta);
}

double wrap_angle(double a) {
  constexpr double pi = std::numbers::pi;
  double w = std::remainder(a, 2.0 * pi);  // [-pi, pi]
  if (w <= -pi) w += 2.0 * pi;
  return w;
}

GroupElement compose(const GroupElement& g, const GroupElement& h) {
  const double c = std::cos(g.theta);
  const double s = std::sin(g.theta);
  return {g.x + c * h.x - s * h.y, g.y + s * h.x + c * h.y, wrap_angle(g.theta + h.theta)};
}

GroupElement inverse(const GroupElement& g) {
  const double c = std::cos(g.theta);
  const double s = std::sin(g.theta);
  return {-(c * g.x + s * g.y), s * g.x - c * g.y, wrap_angle(-g.theta)};
}

GroupElement exp(const BodyVelocity& xi, double dt) {
  if (dt < 0.0) throw std::invalid_argument("exp: dt must be non-negative");
  const double th = xi.xi_theta * dt;
  const double vx = xi.xi_x * dt;
  const double vy = xi.xi_y * dt;
  double a;  // sin(th)/th
  double b;  // (1 - cos(th))/th, evaluated as 2 sin^2(th/2)/th to avoid cancellation
  if (std::abs(th) < kSmallAngle) {
    a = 1.0 - th * th / 6.0;
    b = 0.5 * th;
  } else {
    a = std::sin(th) / th;
    const double s = std::sin(0.5 * th);
    b = 2.0 * s * s / th;
  }
  return {a * vx - b * vy, b * vx + a * vy, wrap_angle(th)};
}

GroupElement integrate_trajectory(const GroupElement& g0, std::span<const BodyVelocity> xi_series,
                                  double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_trajectory: dt must be positive");
  GroupElement g = g0;
  for (const auto& xi : xi_series) g = compose(g, exp(xi, dt));
  return g;
}

BodyVelocity bracket(const BodyVelocity& a, const BodyVelocity& b) {
  // ad_a b for se(2) with (v, w) ordering.
  return {a.xi_y * b.xi_theta - a.xi_theta * b.xi_y, a.xi_theta * b.xi_x - a.xi_x * b.xi_theta, 0.0};
}

}  // namespace geomadapt
