#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "geomadapt/gait.hpp"
#include "geomadapt/se2.hpp"

namespace geomadapt {

/// N-link planar swimmer with uniform links under resistive-force drag.
struct SwimmerParams {
  int n_links{3};
  double link_length{1.0};
  double c_tangential{1.0};
  /// Normal-to-tangential drag coefficient ratio k.
  double drag_ratio{2.0};

  int joints() const { return n_links - 1; }
  /// Throws DimensionError on an invalid combination.
  void validate() const;
};

using ConnectionMatrix = Eigen::Matrix<double, 3, Eigen::Dynamic>;

/// Linear force/torque balance on the swimmer: rows (Fx, Fy, torque) in the
/// body frame, columns (xi_x, xi_y, xi_theta, r_dot_1..r_dot_d).
Eigen::Matrix<double, 3, Eigen::Dynamic> drag_balance(const Shape& r, const SwimmerParams& params);

/// A(r) with xi = -A(r) r_dot. The body frame sits at the centre of the
/// middle link, aligned with it; joint angles are relative between links.
/// Throws NumericalError if the velocity block is ill-conditioned.
ConnectionMatrix local_connection(const Shape& r, const SwimmerParams& params);

BodyVelocity body_velocity(const Shape& r, const ShapeVelocity& r_dot, const SwimmerParams& params);

/// Length-weighted centroid of the swimmer in the body frame.
Eigen::Vector2d centroid_in_body(const Shape& r, const SwimmerParams& params);

/// One recorded simulation step. `r_dot` is the shape rate applied over the
/// step, and `xi` is exactly body_velocity(r, r_dot).
struct Sample {
  double t{0.0};
  double phi{0.0};
  Shape r;
  ShapeVelocity r_dot;
  BodyVelocity xi;
};

struct CycleSegment {
  std::vector<Sample> samples;
  std::vector<GroupElement> poses;  // pose at the start of each step
  GroupElement start;
  GroupElement end;
};

/// Stateful rollout of a commanded (optionally perturbed) gait.
///
/// Within each step the shape follows theta(phi(t)) + delta_n + delta_dot (t - t_n),
/// and the pose is advanced with a fourth-order Magnus step built from two
/// Gauss-point body velocities, so pose error is O(dt^4) per cycle.
class Simulator {
 public:
  Simulator(SwimmerParams params, int steps_per_cycle = 200);

  void set_drag_ratio(double k);
  const SwimmerParams& params() const { return params_; }
  int steps_per_cycle() const { return steps_per_cycle_; }
  const GroupElement& pose() const { return pose_; }
  double time() const { return t_; }

  /// Runs one full period of `gait`. Perturbation state is advanced in place.
  CycleSegment run_cycle(const Gait& gait, PerturbationState* perturbation = nullptr);

 private:
  SwimmerParams params_;
  int steps_per_cycle_;
  GroupElement pose_{};
  double t_{0.0};
};

/// Convenience wrapper: one cycle from the identity pose.
CycleSegment simulate_cycle(const Gait& gait, const SwimmerParams& params, int steps_per_cycle = 200,
                            PerturbationState* perturbation = nullptr);

/// Net pose change over one unperturbed cycle, expressed in the start frame.
GroupElement cycle_displacement(const Gait& gait, const SwimmerParams& params, int steps_per_cycle = 200);

/// World-frame displacement of the swimmer's centroid over one unperturbed cycle.
Eigen::Vector2d centroid_cycle_displacement(const Gait& gait, const SwimmerParams& params,
                                            int steps_per_cycle = 200);

}  // namespace geomadapt
