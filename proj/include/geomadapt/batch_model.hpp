#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "geomadapt/adaptive_model.hpp"
#include "geomadapt/gait.hpp"
#include "geomadapt/parallel.hpp"
#include "geomadapt/swimmer.hpp"

namespace geomadapt {

/// Append-only record of (t, phi, r, r_dot, xi) samples.
class SampleStore {
 public:
  explicit SampleStore(int joints) : joints_(joints) {}

  void append(const Sample& s);
  void append(const std::vector<Sample>& samples);

  int joints() const { return joints_; }
  std::size_t size() const { return samples_.size(); }
  const std::vector<Sample>& samples() const { return samples_; }

  /// Columns: t, phi, r_1..r_d, rdot_1..rdot_d, xi_x, xi_y, xi_theta.
  /// Lines starting with '#' are comments.
  void write_csv(std::ostream& out) const;
  static SampleStore read_csv(std::istream& in);
  static std::string csv_header(int joints);

 private:
  int joints_;
  std::vector<Sample> samples_;
};

/// Per-window linear models in the same regressor as the filter bank,
/// smoothed across phase with the same Fourier kernel.
class BatchModel {
 public:
  BatchModel(Gait nominal, PhaseWindowGrid grid, int smoothing_order,
             std::vector<Eigen::Matrix<double, Eigen::Dynamic, kOutputs>> weights);

  BodyVelocity predict(double phi, const Shape& r, const ShapeVelocity& r_dot) const;

  const Eigen::Matrix<double, Eigen::Dynamic, kOutputs>& window_weights(int m) const { return weights_[m]; }
  const Gait& nominal() const { return nominal_; }

 private:
  Gait nominal_;
  PhaseWindowGrid grid_;
  int smoothing_order_;
  std::vector<Eigen::Matrix<double, Eigen::Dynamic, kOutputs>> weights_;
};

/// Ordinary least squares per window (column-pivoted Householder QR).
/// Throws RankDeficientError naming the first window with too few samples
/// or a rank-deficient design. Windows are independent and may be fitted
/// in parallel; the result does not depend on `exec`.
BatchModel fit_batch(const SampleStore& store, const PhaseWindowGrid& grid, const Gait& nominal,
                     int smoothing_order = 4, Execution exec = Execution::serial);

/// Phase-only baseline: Fourier-smoothed per-window means of xi.
class PhaseAverageModel {
 public:
  PhaseAverageModel(PhaseWindowGrid grid, int smoothing_order, std::vector<BodyVelocity> window_means);

  BodyVelocity predict(double phi) const;
  const BodyVelocity& window_mean(int m) const { return means_[m]; }
  int windows() const { return grid_.size(); }

 private:
  PhaseWindowGrid grid_;
  int smoothing_order_;
  std::vector<BodyVelocity> means_;
};

/// Throws UnfittedModelError naming an empty window.
PhaseAverageModel fit_phase_average(const SampleStore& store, const PhaseWindowGrid& grid, int smoothing_order = 4);

/// Recursive form of the phase-average baseline: a one-parameter RLS filter
/// (constant regressor) per window and output.
class RecursivePhaseAverage {
 public:
  RecursivePhaseAverage(PhaseWindowGrid grid, double lambda, double prior_variance = 1e3, int smoothing_order = 4);

  void ingest(double phi, const BodyVelocity& xi);
  BodyVelocity predict(double phi) const;
  bool fitted() const;

  /// Overwrites the per-window estimates, leaving the filter covariances.
  void set_window_value(int m, const BodyVelocity& v);
  BodyVelocity window_value(int m) const;
  const PhaseWindowGrid& grid() const { return grid_; }

 private:
  PhaseWindowGrid grid_;
  int smoothing_order_;
  std::vector<std::array<RlsFilter, kOutputs>> filters_;
};

}  // namespace geomadapt
