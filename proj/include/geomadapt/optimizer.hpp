#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "geomadapt/adaptive_model.hpp"
#include "geomadapt/gait.hpp"
#include "geomadapt/swimmer.hpp"

namespace geomadapt {

/// Modelling and excitation settings shared by every experiment family.
struct ModelSettings {
  int windows{16};
  double overlap{2.0};
  double lambda_rls{0.99};
  double lambda_gamma{0.995};
  double prior_variance{1e3};
  int smoothing_order{4};
  /// Stationary RMS of the shape perturbation, in radians.
  double perturbation_rms{0.1};
  int steps_per_cycle{200};
  /// Explicit SDE constants; unset values follow the gait period
  /// (alpha = 2/T, beta = (2 pi/T)^2, eta from perturbation_rms).
  std::optional<double> sde_alpha;
  std::optional<double> sde_beta;
  std::optional<double> sde_eta;

  PerturbationState perturbation(int joints, double period, std::uint64_t key, std::uint64_t stream = 0) const;
  PhaseWindowGrid grid() const { return PhaseWindowGrid::with_overlap(windows, overlap); }
  FilterBankOptions bank_options() const { return {lambda_rls, prior_variance, smoothing_order}; }
};

enum class Objective { forward, lateral, rotation };

Objective objective_from_string(const std::string& name);
std::string to_string(Objective objective);

/// Selects the objective component of a per-cycle displacement.
double objective_component(const GroupElement& displacement, Objective objective);

struct OptimizationConfig {
  double gamma_threshold{0.5};
  /// Length of each projected ascent step in coefficient space.
  double step_size{0.05};
  double fd_epsilon{1e-3};
  int max_cycles{40};
  Objective objective{Objective::forward};
  /// Box constraint |coefficient| <= amplitude_bound on every coefficient.
  double amplitude_bound{0.9};
  int min_cycles_per_iteration{2};
  /// Rebase the bank onto each new gait (true) or start a fresh bank.
  bool rebase_on_step{true};
  ModelSettings model{};

  /// Throws ConfigError on invalid values.
  void validate() const;
};

/// One executed simulation step with its online model outputs.
struct StepRow {
  int iteration{0};
  int cycle{0};
  double t{0.0};
  double phi{0.0};
  Eigen::VectorXd r;
  Eigen::VectorXd r_dot;
  BodyVelocity xi;
  BodyVelocity xi_d;
  BodyVelocity xi_t;
  std::optional<double> gamma;
};

/// Summary of one optimizer iteration, i.e. one nominal gait held fixed.
struct IterationRow {
  int iteration{0};
  /// Total cycles executed when this gait was adopted / when it was left.
  int start_cycle{0};
  int end_cycle{0};
  std::optional<double> gamma;
  Eigen::VectorXd coefficients;
  /// Model-predicted objective of this gait at the end of the iteration.
  std::optional<double> predicted_objective;
  /// Mean objective over this iteration's perturbed cycles.
  double realized_displacement{0.0};
  /// Objective of this gait rolled out without perturbation (evaluation only).
  double nominal_displacement{0.0};
  /// True if the gate passed and a gradient step followed.
  bool stepped{false};
};

enum class OptimizationOutcome { completed, gate_never_passed };

struct TrialRecord {
  std::vector<StepRow> steps;
  std::vector<IterationRow> iterations;
  OptimizationOutcome outcome{OptimizationOutcome::completed};
  Gait seed_gait{Gait::zero(1, 1, 1.0)};
  Gait final_gait{Gait::zero(1, 1, 1.0)};
  double seed_displacement{0.0};
  double final_displacement{0.0};
  int cycles_consumed{0};

  /// final / seed - 1, on unperturbed per-cycle objective.
  double relative_improvement() const;
  /// Cycles executed before the final gait was adopted.
  int cycles_to_final_gait() const;
  /// Relative improvement of the gait in use at the start of each cycle.
  std::vector<double> improvement_by_cycle() const;
};

/// Streaming hooks for incremental (crash-safe) persistence.
struct TrialSink {
  std::function<void(const StepRow&)> on_step;
  std::function<void(const IterationRow&)> on_iteration;
};

/// Predicted per-cycle objective of `gait` under the bank's model. Shape
/// offsets are taken against the bank's current nominal, and the predicted
/// body velocities are integrated over one period with `steps` samples.
double model_objective(const FilterBank& bank, const Gait& gait, int steps, Objective objective = Objective::forward);

/// Central finite differences of model_objective over every gait coefficient.
Eigen::VectorXd policy_gradient(const FilterBank& bank, const Gait& gait, const OptimizationConfig& cfg);

/// Clamps every coefficient into [-bound, bound].
Eigen::VectorXd project_to_box(Eigen::VectorXd p, double bound);

/// Unperturbed per-cycle objective of a gait on the true swimmer.
double true_objective(const Gait& gait, const SwimmerParams& params, int steps_per_cycle, Objective objective);

/// Confidence-gated optimization loop: execute perturbed cycles, learn
/// online, and step along the model gradient only once the current
/// iteration's recursive gamma reaches the threshold.
TrialRecord optimize(const SwimmerParams& params, const Gait& seed_gait, const OptimizationConfig& cfg,
                     std::uint64_t rng_seed, const TrialSink* sink = nullptr, std::uint64_t rng_stream = 0);

}  // namespace geomadapt
