#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "geomadapt/rng.hpp"

namespace geomadapt {

using Shape = Eigen::VectorXd;          // joint angles r, length d
using ShapeVelocity = Eigen::VectorXd;  // joint rates r_dot, length d

/// Periodic joint-angle trajectory, one truncated Fourier series per joint.
///
/// Row j of `coefficients` holds [c0, cos_1, sin_1, cos_2, sin_2, ...] for
/// joint j, so theta_j(phi) = c0 + sum_f cos_f cos(f phi) + sin_f sin(f phi).
/// Phase advances uniformly: phi(t) = phase_rate * t (mod 2 pi).
class Gait {
 public:
  Gait(Eigen::MatrixXd coefficients, double period);

  /// Zero-amplitude gait with `joints` joints and Fourier order `order`.
  static Gait zero(int joints, int order, double period);

  /// First-order gait theta_j = amplitude * cos(phi + j * lag): joint j lags
  /// joint j + 1, so the wave runs from the last joint toward joint 0 and a
  /// swimmer driven by it moves toward +x.
  static Gait traveling_wave(int joints, double amplitude, double lag, double period);

  /// Default seed: traveling_wave with lag 2 pi / max(d, 4).
  static Gait seed(int joints, double amplitude = 0.5, double period = 1.0);

  int joints() const { return static_cast<int>(coefficients_.rows()); }
  int order() const { return static_cast<int>((coefficients_.cols() - 1) / 2); }
  double period() const { return period_; }
  double phase_rate() const { return phase_rate_; }
  const Eigen::MatrixXd& coefficients() const { return coefficients_; }

  /// Coefficients flattened joint-major; the optimizer's search space.
  Eigen::VectorXd parameters() const;
  Gait with_parameters(const Eigen::VectorXd& p) const;

  Shape shape(double phi) const;
  /// Time derivative (phase derivative scaled by the phase rate).
  ShapeVelocity shape_velocity(double phi) const;

  bool operator==(const Gait& o) const {
    return period_ == o.period_ && coefficients_ == o.coefficients_;
  }

 private:
  Eigen::MatrixXd coefficients_;
  double period_;
  double phase_rate_;
};

struct NominalShape {
  Shape r;
  ShapeVelocity r_dot;
};

NominalShape nominal_shape(const Gait& gait, double phi);

/// {"period": T, "coefficients": [[c0, cos_1, sin_1, ...], ...]} one row per joint.
nlohmann::json gait_to_json(const Gait& gait);
Gait gait_from_json(const nlohmann::json& j);

/// Equally spaced, overlapping phase windows on the circle.
class PhaseWindowGrid {
 public:
  PhaseWindowGrid(int m_windows, double width);
  /// M windows of width overlap * (2 pi / M).
  static PhaseWindowGrid with_overlap(int m_windows, double overlap = 2.0);

  int size() const { return m_; }
  double width() const { return width_; }
  double spacing() const;
  double center(int m) const;

  bool operator==(const PhaseWindowGrid& o) const { return m_ == o.m_ && width_ == o.width_; }

 private:
  int m_;
  double width_;
};

/// Shortest angular distance between two phases, in [0, pi].
double circular_distance(double a, double b);

/// Indices m with circular_distance(phi, center_m) <= width / 2, ascending.
std::vector<int> covering_windows(const PhaseWindowGrid& grid, double phi);

/// Second-order smoothing filter driven by white noise:
///   d(delta_dot) = -(alpha delta_dot + beta delta) dt + eta dW, per joint.
struct PerturbationState {
  Eigen::VectorXd delta;
  Eigen::VectorXd delta_dot;
  double alpha;
  double beta;
  double eta;
  Philox4x32 rng;

  PerturbationState(int joints, double alpha, double beta, double eta, std::uint64_t seed,
                    std::uint64_t stream = 0);

  /// Defaults tied to the gait period: alpha = 2/T, beta = (2 pi/T)^2, and
  /// eta chosen so the stationary RMS of delta is `rms`.
  static PerturbationState for_period(int joints, double period, double rms, std::uint64_t seed,
                                      std::uint64_t stream = 0);
};

/// Continuous-time stationary standard deviation of delta.
double stationary_delta_rms(double alpha, double beta, double eta);

/// One Euler-Maruyama step: delta_dot first, then delta with the new rate.
void step_perturbation(PerturbationState& state, double dt);

}  // namespace geomadapt
