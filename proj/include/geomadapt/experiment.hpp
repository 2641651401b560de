#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geomadapt/experiment_config.hpp"
#include "geomadapt/optimizer.hpp"

namespace geomadapt {

/// Holdout Γ of the adaptive and batch models after each experience checkpoint.
struct AccuracyResult {
  std::vector<int> checkpoints;                // cycles of training experience
  std::vector<std::vector<double>> adaptive;  // [checkpoint][pair], NaN if undefined
  std::vector<std::vector<double>> batch;     // [checkpoint][pair], NaN if the fit failed
  std::vector<std::string> warnings;
  std::vector<std::string> files;

  /// Index into `checkpoints`; throws ConfigError if `cycles` is not one.
  std::size_t checkpoint_index(int cycles) const;
};

/// Recovery statistics of one model over one post-training phase.
struct DragRecovery {
  int phase{0};
  double drag_ratio{0.0};
  std::string model;
  /// Error curves are medians pooled over all trials within bins of
  /// 1/bins_per_cycle cycle. Crossing: end of the first bin (in cycles after
  /// the phase start) where the model's median log error is below the frozen
  /// batch model's plus log(recovery_ratio). Settled: end of the bin after
  /// which it stays below until the phase ends. Empty if never (and always
  /// for the batch model itself).
  std::optional<double> crossing_cycles;
  std::optional<double> settled_cycles;
  /// Median and variance of the log error over the last half of the phase
  /// (at most ten cycles).
  double steady_median{0.0};
  double steady_variance{0.0};
};

struct DragChangeResult {
  int steps_per_cycle{0};
  std::vector<std::string> models;  // adaptive models in lambda order, then the frozen batch model
  std::vector<double> phase_ratios;
  int phase_cycles{0};
  /// Natural log of the per-sample Euclidean prediction error, [model][trial][sample].
  std::vector<std::vector<std::vector<double>>> log_error;
  std::vector<DragRecovery> recovery;
  std::vector<std::string> warnings;
  std::vector<std::string> files;

  const DragRecovery& find(const std::string& model, int phase) const;
};

struct OptimizationTrial {
  int links{0};
  int trial{0};
  std::uint64_t key{0};
  std::uint64_t stream{0};
  /// Per-step rows are dropped after persistence; iterations are kept.
  TrialRecord record;
};

struct OptimizationResult {
  std::vector<int> links;
  std::vector<OptimizationTrial> trials;  // ordered by (links, trial)
  std::vector<std::string> warnings;
  std::vector<std::string> files;

  std::vector<double> improvements(int links) const;
  std::vector<double> cycles_to_final(int links) const;
};

struct SimulationResult {
  std::vector<Sample> samples;
  std::vector<GroupElement> poses;
  std::vector<std::string> files;
};

/// Each runner writes its result files under cfg.output_dir (nothing is
/// written when it is empty) and returns the in-memory summary. Trials run
/// through for_each_index(cfg.execution) and are reported in trial order, so
/// outputs are identical for serial and parallel execution.
AccuracyResult run_accuracy_experiment(const ExperimentConfig& cfg);
DragChangeResult run_drag_change_experiment(const ExperimentConfig& cfg);
OptimizationResult run_optimization_experiment(const ExperimentConfig& cfg);
SimulationResult run_simulation(const ExperimentConfig& cfg);

/// '#' header lines embedding the family, seed and resolved config.
std::vector<std::string> provenance_lines(const ExperimentConfig& cfg);

/// Column header of the per-trial iteration CSV.
std::string iteration_csv_header(int parameters);
/// Column header of the per-trial step CSV.
std::string step_csv_header(int joints);

}  // namespace geomadapt
