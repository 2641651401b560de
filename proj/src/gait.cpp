#include "geomadapt/gait.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "geomadapt/errors.hpp"

namespace geomadapt {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

Gait::Gait(Eigen::MatrixXd coefficients, double period)
    : coefficients_(std::move(coefficients)), period_(period), phase_rate_(kTwoPi / period) {
  if (!(period > 0.0) || !std::isfinite(period)) throw DimensionError("gait period must be positive");
  if (coefficients_.rows() < 1 || coefficients_.cols() < 1 || coefficients_.cols() % 2 == 0)
    throw DimensionError("gait coefficients must have 1 + 2F columns");
  if (!coefficients_.allFinite()) throw DimensionError("gait coefficients must be finite");
}

Gait Gait::zero(int joints, int order, double period) {
  return Gait(Eigen::MatrixXd::Zero(joints, 1 + 2 * order), period);
}

Gait Gait::traveling_wave(int joints, double amplitude, double lag, double period) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(joints, 3);
  for (int j = 0; j < joints; ++j) {
    // a cos(phi + j lag) = a cos(j lag) cos(phi) - a sin(j lag) sin(phi)
    c(j, 1) = amplitude * std::cos(j * lag);
    c(j, 2) = -amplitude * std::sin(j * lag);
  }
  return Gait(std::move(c), period);
}

Gait Gait::seed(int joints, double amplitude, double period) {
  return traveling_wave(joints, amplitude, kTwoPi / std::max(joints, 4), period);
}

Eigen::VectorXd Gait::parameters() const {
  Eigen::VectorXd p(coefficients_.size());
  for (Eigen::Index j = 0; j < coefficients_.rows(); ++j)
    p.segment(j * coefficients_.cols(), coefficients_.cols()) = coefficients_.row(j).transpose();
  return p;
}

Gait Gait::with_parameters(const Eigen::VectorXd& p) const {
  if (p.size() != coefficients_.size()) throw DimensionError("gait parameter vector size mismatch");
  Eigen::MatrixXd c(coefficients_.rows(), coefficients_.cols());
  for (Eigen::Index j = 0; j < c.rows(); ++j)
    c.row(j) = p.segment(j * c.cols(), c.cols()).transpose();
  return Gait(std::move(c), period_);
}

Shape Gait::shape(double phi) const {
  Shape r = coefficients_.col(0);
  for (int f = 1; f <= order(); ++f) {
    r += coefficients_.col(2 * f - 1) * std::cos(f * phi) + coefficients_.col(2 * f) * std::sin(f * phi);
  }
  return r;
}

ShapeVelocity Gait::shape_velocity(double phi) const {
  ShapeVelocity v = ShapeVelocity::Zero(joints());
  for (int f = 1; f <= order(); ++f) {
    v += f * (coefficients_.col(2 * f) * std::cos(f * phi) - coefficients_.col(2 * f - 1) * std::sin(f * phi));
  }
  return v * phase_rate_;
}

NominalShape nominal_shape(const Gait& gait, double phi) {
  return {gait.shape(phi), gait.shape_velocity(phi)};
}

nlohmann::json gait_to_json(const Gait& gait) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index j = 0; j < gait.coefficients().rows(); ++j) {
    std::vector<double> row(gait.coefficients().cols());
    for (Eigen::Index c = 0; c < gait.coefficients().cols(); ++c) row[c] = gait.coefficients()(j, c);
    rows.push_back(row);
  }
  return {{"period", gait.period()}, {"coefficients", rows}};
}

Gait gait_from_json(const nlohmann::json& j) {
  const auto& rows = j.at("coefficients");
  if (!rows.is_array() || rows.empty()) throw DimensionError("gait coefficients must be a non-empty array");
  const auto cols = rows.at(0).size();
  Eigen::MatrixXd c(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw DimensionError("gait coefficient rows must have equal length");
    for (std::size_t k = 0; k < cols; ++k) c(r, k) = rows[r][k].get<double>();
  }
  return Gait(std::move(c), j.at("period").get<double>());
}

PhaseWindowGrid::PhaseWindowGrid(int m_windows, double width) : m_(m_windows), width_(width) {
  if (m_windows < 1) throw DimensionError("phase window grid needs at least one window");
  if (!(width > 0.0) || width > kTwoPi) throw DimensionError("phase window width must be in (0, 2 pi]");
  if (width < spacing()) throw DimensionError("phase windows must cover the circle (width >= spacing)");
}

PhaseWindowGrid PhaseWindowGrid::with_overlap(int m_windows, double overlap) {
  return PhaseWindowGrid(m_windows, std::min(kTwoPi, overlap * kTwoPi / m_windows));
}

double PhaseWindowGrid::spacing() const { return kTwoPi / m_; }

double PhaseWindowGrid::center(int m) const { return kTwoPi * m / m_; }

double circular_distance(double a, double b) {
  return std::abs(std::remainder(a - b, kTwoPi));
}

std::vector<int> covering_windows(const PhaseWindowGrid& grid, double phi) {
  // Slack absorbs rounding when phi sits exactly on a window edge.
  constexpr double kEdgeSlack = 1e-12;
  const double half = 0.5 * grid.width() + kEdgeSlack;
  std::vector<int> out;
  const int m = grid.size();
  const int nearest = static_cast<int>(std::lround(phi / grid.spacing()));
  const int reach = static_cast<int>(std::ceil(half / grid.spacing())) + 1;
  if (2 * reach + 1 >= m) {
    for (int i = 0; i < m; ++i)
      if (circular_distance(phi, grid.center(i)) <= half) out.push_back(i);
    return out;
  }
  for (int off = -reach; off <= reach; ++off) {
    const int i = ((nearest + off) % m + m) % m;
    if (circular_distance(phi, grid.center(i)) <= half) out.push_back(i);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PerturbationState::PerturbationState(int joints, double alpha_, double beta_, double eta_,
                                     std::uint64_t seed, std::uint64_t stream)
    : delta(Eigen::VectorXd::Zero(joints)),
      delta_dot(Eigen::VectorXd::Zero(joints)),
      alpha(alpha_),
      beta(beta_),
      eta(eta_),
      rng(seed, stream) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw DimensionError("perturbation alpha and beta must be positive");
  if (!(eta >= 0.0)) throw DimensionError("perturbation eta must be non-negative");
}

PerturbationState PerturbationState::for_period(int joints, double period, double rms,
                                                std::uint64_t seed, std::uint64_t stream) {
  const double alpha = 2.0 / period;
  const double beta = std::pow(kTwoPi / period, 2);
  const double eta = rms * std::sqrt(2.0 * alpha * beta);
  return PerturbationState(joints, alpha, beta, eta, seed, stream);
}

double stationary_delta_rms(double alpha, double beta, double eta) {
  return eta / std::sqrt(2.0 * alpha * beta);
}

void step_perturbation(PerturbationState& s, double dt) {
  if (!(dt > 0.0)) throw DimensionError("perturbation step must be positive");
  const double noise_scale = s.eta * std::sqrt(dt);
  for (Eigen::Index j = 0; j < s.delta.size(); ++j) {
    const double z = noise_scale > 0.0 ? s.rng.normal() : 0.0;
    s.delta_dot[j] += -(s.alpha * s.delta_dot[j] + s.beta * s.delta[j]) * dt + noise_scale * z;
    s.delta[j] += s.delta_dot[j] * dt;
  }
}

}  // namespace geomadapt
