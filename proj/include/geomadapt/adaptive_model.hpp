#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "geomadapt/gait.hpp"
#include "geomadapt/se2.hpp"

namespace geomadapt {

/// Number of body-velocity outputs modelled on SE(2).
inline constexpr int kOutputs = 3;

/// 1 + 2d + d^2.
int regressor_size(int joints);

/// [1, delta, delta_dot, vec(delta delta_dot^T)] with the outer product
/// flattened row-major (entry i*d + j is delta_i * delta_dot_j).
Eigen::VectorXd build_regressor(const Eigen::VectorXd& delta, const Eigen::VectorXd& delta_dot);

/// Fourier-smoothing kernel over window centres: the value of the order-F
/// least-squares Fourier fit through per-window values v_m, evaluated at
/// phi, is sum_m kernel[m] * v_m.
Eigen::VectorXd phase_smoothing_kernel(const PhaseWindowGrid& grid, int order, double phi);

/// Largest Fourier order that does not alias on an M-window grid.
int max_smoothing_order(int m_windows);

/// Exponentially weighted recursive least squares for one scalar output.
class RlsFilter {
 public:
  RlsFilter(int size, double lambda, double prior_variance = 1e3);

  /// Gain g = P x / (lambda + x^T P x); w += g (y - w^T x);
  /// P = (P - g x^T P) / lambda, re-symmetrized. Resets P to the prior
  /// (keeping w) if the update leaves P non-finite or not positive on the
  /// diagonal. Throws NumericalError on non-finite x or y.
  void update(const Eigen::VectorXd& x, double y);

  double predict(const Eigen::VectorXd& x) const { return weights_.dot(x); }

  const Eigen::VectorXd& weights() const { return weights_; }
  Eigen::VectorXd& weights() { return weights_; }
  const Eigen::MatrixXd& covariance() const { return covariance_; }
  double lambda() const { return lambda_; }
  double prior_variance() const { return prior_variance_; }
  long updates() const { return updates_; }
  int covariance_resets() const { return resets_; }

  nlohmann::json to_json() const;
  static RlsFilter from_json(const nlohmann::json& j);

 private:
  void reset_covariance();

  Eigen::VectorXd weights_;
  Eigen::MatrixXd covariance_;
  double lambda_;
  double prior_variance_;
  long updates_{0};
  int resets_{0};
};

/// Free-function form of RlsFilter::update.
inline void rls_update(RlsFilter& filter, const Eigen::VectorXd& x, double y) { filter.update(x, y); }

struct FilterBankOptions {
  double lambda_rls{0.99};
  double prior_variance{1e3};
  int smoothing_order{4};
};

/// Phase-windowed bank of RLS filters, one per (window, body-velocity output).
///
/// Samples update every window that covers their phase, with perturbations
/// measured from that window's centre nominal. Predictions smooth each
/// window's linear model across phase with a truncated Fourier series and
/// measure perturbations from the nominal at the query phase.
class FilterBank {
 public:
  FilterBank(Gait nominal, PhaseWindowGrid grid, FilterBankOptions options = {});

  void ingest(double phi, const Shape& r, const ShapeVelocity& r_dot, const BodyVelocity& xi);

  /// Throws UnfittedModelError until every window has received a sample.
  BodyVelocity predict(double phi, const Shape& r, const ShapeVelocity& r_dot) const;
  /// Same as predict without the fitted check; unfitted windows contribute
  /// their initial (zero) weights.
  BodyVelocity evaluate(double phi, const Shape& r, const ShapeVelocity& r_dot) const;

  /// Moves the linearization to `new_gait`: each window's constant weight
  /// becomes the old model evaluated at the new centre nominal; all other
  /// weights and every covariance are left untouched.
  void rebase(const Gait& new_gait);

  bool fitted() const;
  int joints() const { return nominal_.joints(); }
  int windows() const { return grid_.size(); }
  const Gait& nominal() const { return nominal_; }
  const PhaseWindowGrid& grid() const { return grid_; }
  const FilterBankOptions& options() const { return options_; }
  const RlsFilter& filter(int window, int output) const { return filters_[window][output]; }
  long window_updates(int window) const { return filters_[window][0].updates(); }

  nlohmann::json to_json() const;
  static FilterBank from_json(const nlohmann::json& j);

 private:
  void cache_centres();

  Gait nominal_;
  PhaseWindowGrid grid_;
  FilterBankOptions options_;
  std::vector<std::array<RlsFilter, kOutputs>> filters_;
  std::vector<NominalShape> centres_;
};

void ingest_sample(FilterBank& bank, double phi, const Shape& r, const ShapeVelocity& r_dot,
                   const BodyVelocity& xi);
BodyVelocity predict(const FilterBank& bank, double phi, const Shape& r, const ShapeVelocity& r_dot);
void rebase(FilterBank& bank, const Gait& new_gait);

}  // namespace geomadapt
