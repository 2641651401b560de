#include "geomadapt/metrics.hpp"

#include <cmath>

#include "geomadapt/errors.hpp"

namespace geomadapt {

double weighted_error(const BodyVelocity& prediction, const BodyVelocity& truth, const ErrorWeights& weights) {
  double s = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double e = weights.w[k] * (prediction[k] - truth[k]);
    s += e * e;
  }
  return std::sqrt(s);
}

std::optional<double> gamma_batch(std::span<const BodyVelocity> predictions_d,
                                  std::span<const BodyVelocity> predictions_t, std::span<const BodyVelocity> truths,
                                  const ErrorWeights& weights) {
  if (truths.empty()) throw DimensionError("gamma_batch needs at least one sample");
  if (predictions_d.size() != truths.size() || predictions_t.size() != truths.size())
    throw DimensionError("gamma_batch inputs differ in length");
  double sum_d = 0.0;
  double sum_t = 0.0;
  for (std::size_t n = 0; n < truths.size(); ++n) {
    sum_d += weighted_error(predictions_d[n], truths[n], weights);
    sum_t += weighted_error(predictions_t[n], truths[n], weights);
  }
  if (!(sum_t > 0.0)) return std::nullopt;
  return 1.0 - sum_d / sum_t;
}

GammaState::GammaState(double lambda) : lambda_gamma(lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw DimensionError("gamma forgetting factor must be in (0, 1]");
}

std::optional<double> GammaState::value() const {
  if (!(psi_t > 0.0)) return std::nullopt;
  return 1.0 - psi_d / psi_t;
}

std::optional<double> gamma_update(GammaState& state, const BodyVelocity& xi_d, const BodyVelocity& xi_t,
                                   const BodyVelocity& xi, const ErrorWeights& weights) {
  state.psi_d = state.lambda_gamma * state.psi_d + weighted_error(xi_d, xi, weights);
  state.psi_t = state.lambda_gamma * state.psi_t + weighted_error(xi_t, xi, weights);
  return state.value();
}

}  // namespace geomadapt
