#pragma once

#include <array>
#include <optional>
#include <span>

#include "geomadapt/se2.hpp"

namespace geomadapt {

/// Per-component weights applied inside the error norm. Identity by
/// default, i.e. the plain Euclidean norm over (xi_x, xi_y, xi_theta).
struct ErrorWeights {
  std::array<double, 3> w{1.0, 1.0, 1.0};
};

double weighted_error(const BodyVelocity& prediction, const BodyVelocity& truth, const ErrorWeights& weights = {});

/// Model confidence relative to the phase-average baseline:
///   1 - sum ||xi_D - xi|| / sum ||xi_T - xi||.
/// Returns nullopt when the baseline error sum is zero (degenerate metric).
/// Throws DimensionError on empty or mismatched inputs.
std::optional<double> gamma_batch(std::span<const BodyVelocity> predictions_d,
                                  std::span<const BodyVelocity> predictions_t,
                                  std::span<const BodyVelocity> truths, const ErrorWeights& weights = {});

/// Exponentially forgetting accumulators for the online form of gamma.
struct GammaState {
  double psi_d{0.0};
  double psi_t{0.0};
  double lambda_gamma{0.995};

  explicit GammaState(double lambda = 0.995);
  /// 1 - psi_d / psi_t, or nullopt while psi_t == 0.
  std::optional<double> value() const;
  void reset() { psi_d = psi_t = 0.0; }
};

/// Decays both accumulators by lambda_gamma, adds the new error norms, and
/// returns the updated gamma (nullopt while the baseline error is zero).
std::optional<double> gamma_update(GammaState& state, const BodyVelocity& xi_d, const BodyVelocity& xi_t,
                                   const BodyVelocity& xi, const ErrorWeights& weights = {});

}  // namespace geomadapt
