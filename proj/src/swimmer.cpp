#include "geomadapt/swimmer.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "geomadapt/errors.hpp"

namespace geomadapt {

namespace {

constexpr double kMaxCondition = 1e12;

struct LinkFrame {
  Eigen::Vector2d center;
  double angle;
  Eigen::Matrix2Xd dcenter_dr;  // 2 x d
  Eigen::RowVectorXd dangle_dr;  // 1 x d
};

// Link centres, headings, and their shape Jacobians in the middle-link frame.
std::vector<LinkFrame> link_frames(const Shape& r, const SwimmerParams& p) {
  const int n = p.n_links;
  const int d = p.joints();
  const int mid = (n - 1) / 2;
  const double half = 0.5 * p.link_length;
  std::vector<LinkFrame> links(n);
  for (auto& l : links) {
    l.center.setZero();
    l.angle = 0.0;
    l.dcenter_dr = Eigen::Matrix2Xd::Zero(2, d);
    l.dangle_dr = Eigen::RowVectorXd::Zero(d);
  }
  auto tangent = [](double a) { return Eigen::Vector2d(std::cos(a), std::sin(a)); };
  auto normal = [](double a) { return Eigen::Vector2d(-std::sin(a), std::cos(a)); };

  for (int i = mid + 1; i < n; ++i) {
    LinkFrame& prev = links[i - 1];
    LinkFrame& cur = links[i];
    cur.angle = prev.angle + r[i - 1];
    cur.dangle_dr = prev.dangle_dr;
    cur.dangle_dr[i - 1] += 1.0;
    cur.center = prev.center + half * (tangent(prev.angle) + tangent(cur.angle));
    cur.dcenter_dr = prev.dcenter_dr + half * (normal(prev.angle) * prev.dangle_dr +
                                               normal(cur.angle) * cur.dangle_dr);
  }
  for (int i = mid - 1; i >= 0; --i) {
    LinkFrame& next = links[i + 1];
    LinkFrame& cur = links[i];
    cur.angle = next.angle - r[i];
    cur.dangle_dr = next.dangle_dr;
    cur.dangle_dr[i] -= 1.0;
    cur.center = next.center - half * (tangent(next.angle) + tangent(cur.angle));
    cur.dcenter_dr = next.dcenter_dr - half * (normal(next.angle) * next.dangle_dr +
                                               normal(cur.angle) * cur.dangle_dr);
  }
  return links;
}

void check_shape(const Shape& r, const SwimmerParams& p) {
  if (r.size() != p.joints()) throw DimensionError("shape dimension does not match swimmer joints");
  if (!r.allFinite()) throw DimensionError("shape must be finite");
}

}  // namespace

void SwimmerParams::validate() const {
  if (n_links < 3 || n_links % 2 == 0) throw DimensionError("n_links must be odd and >= 3");
  if (!(link_length > 0.0)) throw DimensionError("link_length must be positive");
  if (!(c_tangential > 0.0)) throw DimensionError("c_tangential must be positive");
  if (!(drag_ratio >= 1.0)) throw DimensionError("drag_ratio must be >= 1");
}

Eigen::Matrix<double, 3, Eigen::Dynamic> drag_balance(const Shape& r, const SwimmerParams& p) {
  p.validate();
  check_shape(r, p);
  const int d = p.joints();
  const double len = p.link_length;
  const double ct = p.c_tangential;
  const double cn = p.drag_ratio * p.c_tangential;
  Eigen::Matrix<double, 3, Eigen::Dynamic> w = Eigen::Matrix<double, 3, Eigen::Dynamic>::Zero(3, 3 + d);

  for (const LinkFrame& link : link_frames(r, p)) {
    const Eigen::Vector2d t(std::cos(link.angle), std::sin(link.angle));
    const Eigen::Vector2d nrm(-t.y(), t.x());
    const Eigen::Matrix2d drag = ct * t * t.transpose() + cn * nrm * nrm.transpose();

    // Velocity of the point at arc length s is a + s * omega * n, where
    // a and omega are linear in the inputs (xi, r_dot).
    Eigen::Matrix<double, 2, Eigen::Dynamic> a(2, 3 + d);
    a.setZero();
    a(0, 0) = 1.0;
    a(1, 1) = 1.0;
    a(0, 2) = -link.center.y();
    a(1, 2) = link.center.x();
    a.rightCols(d) = link.dcenter_dr;
    Eigen::RowVectorXd omega = Eigen::RowVectorXd::Zero(3 + d);
    omega[2] = 1.0;
    omega.tail(d) = link.dangle_dr;

    // Integrals over s in [-L/2, L/2]: the first moment vanishes, the second is L^3/12.
    const Eigen::Matrix<double, 2, Eigen::Dynamic> force = -len * drag * a;
    w.topRows<2>() += force;
    const Eigen::RowVectorXd moment =
        link.center.x() * force.row(1) - link.center.y() * force.row(0);
    w.row(2) += moment - (len * len * len / 12.0) * cn * omega;
  }
  return w;
}

ConnectionMatrix local_connection(const Shape& r, const SwimmerParams& p) {
  const auto w = drag_balance(r, p);
  const Eigen::Matrix3d w_xi = w.leftCols<3>();
  // Condition number from the eigenvalues of the (symmetric) normal matrix.
  const Eigen::Vector3d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(
                                 w_xi.transpose() * w_xi, Eigen::EigenvaluesOnly)
                                 .eigenvalues();
  if (!(ev[0] > 0.0) || std::sqrt(ev[2] / ev[0]) > kMaxCondition)
    throw NumericalError("local_connection: force balance is numerically singular");
  return Eigen::PartialPivLU<Eigen::Matrix3d>(w_xi).solve(w.rightCols(p.joints()));
}

BodyVelocity body_velocity(const Shape& r, const ShapeVelocity& r_dot, const SwimmerParams& p) {
  if (r_dot.size() != p.joints()) throw DimensionError("shape velocity dimension mismatch");
  const Eigen::Vector3d xi = -local_connection(r, p) * r_dot;
  return {xi[0], xi[1], xi[2]};
}

Eigen::Vector2d centroid_in_body(const Shape& r, const SwimmerParams& p) {
  p.validate();
  check_shape(r, p);
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  const auto links = link_frames(r, p);
  for (const auto& l : links) c += l.center;
  return c / static_cast<double>(links.size());
}

Simulator::Simulator(SwimmerParams params, int steps_per_cycle)
    : params_(params), steps_per_cycle_(steps_per_cycle) {
  params_.validate();
  if (steps_per_cycle < 1) throw DimensionError("steps_per_cycle must be positive");
}

void Simulator::set_drag_ratio(double k) {
  SwimmerParams next = params_;
  next.drag_ratio = k;
  next.validate();
  params_ = next;
}

CycleSegment Simulator::run_cycle(const Gait& gait, PerturbationState* perturbation) {
  if (gait.joints() != params_.joints()) throw DimensionError("gait joints do not match swimmer");
  const int steps = steps_per_cycle_;
  const double dt = gait.period() / steps;
  const double two_pi = 2.0 * std::numbers::pi;
  const double gauss_offset = std::sqrt(3.0) / 6.0;
  const double nodes[2] = {0.5 - gauss_offset, 0.5 + gauss_offset};

  CycleSegment seg;
  seg.samples.reserve(steps);
  seg.poses.reserve(steps);
  seg.start = pose_;

  const int d = params_.joints();
  for (int n = 0; n < steps; ++n) {
    const double phi = two_pi * n / steps;
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd rate = Eigen::VectorXd::Zero(d);
    if (perturbation != nullptr) {
      delta = perturbation->delta;
      step_perturbation(*perturbation, dt);
      rate = perturbation->delta_dot;
    }

    Sample s;
    s.t = t_;
    s.phi = phi;
    s.r = gait.shape(phi) + delta;
    s.r_dot = gait.shape_velocity(phi) + rate;
    s.xi = body_velocity(s.r, s.r_dot, params_);

    BodyVelocity gauss_xi[2];
    for (int q = 0; q < 2; ++q) {
      const double tau = nodes[q] * dt;
      const double phq = phi + gait.phase_rate() * tau;
      const Shape rq = gait.shape(phq) + delta + rate * tau;
      const ShapeVelocity vq = gait.shape_velocity(phq) + rate;
      gauss_xi[q] = body_velocity(rq, vq, params_);
    }
    const BodyVelocity omega = (gauss_xi[0] + gauss_xi[1]) * (0.5 * dt) +
                               bracket(gauss_xi[0], gauss_xi[1]) * (std::sqrt(3.0) / 12.0 * dt * dt);

    seg.poses.push_back(pose_);
    seg.samples.push_back(std::move(s));
    pose_ = compose(pose_, exp(omega, 1.0));
    t_ += dt;
  }
  seg.end = pose_;
  return seg;
}

CycleSegment simulate_cycle(const Gait& gait, const SwimmerParams& params, int steps_per_cycle,
                            PerturbationState* perturbation) {
  Simulator sim(params, steps_per_cycle);
  return sim.run_cycle(gait, perturbation);
}

GroupElement cycle_displacement(const Gait& gait, const SwimmerParams& params, int steps_per_cycle) {
  const auto seg = simulate_cycle(gait, params, steps_per_cycle);
  return compose(inverse(seg.start), seg.end);
}

Eigen::Vector2d centroid_cycle_displacement(const Gait& gait, const SwimmerParams& params,
                                            int steps_per_cycle) {
  const auto seg = simulate_cycle(gait, params, steps_per_cycle);
  auto world_centroid = [&](const GroupElement& g, const Shape& r) {
    const Eigen::Vector2d c = centroid_in_body(r, params);
    const double cs = std::cos(g.theta), sn = std::sin(g.theta);
    return Eigen::Vector2d(g.x + cs * c.x() - sn * c.y(), g.y + sn * c.x() + cs * c.y());
  };
  const Shape r0 = gait.shape(0.0);
  return world_centroid(seg.end, r0) - world_centroid(seg.start, r0);
}

}  // namespace geomadapt
