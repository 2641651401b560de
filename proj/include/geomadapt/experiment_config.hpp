#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geomadapt/gait.hpp"
#include "geomadapt/optimizer.hpp"
#include "geomadapt/parallel.hpp"
#include "geomadapt/swimmer.hpp"

namespace geomadapt {

struct AccuracySettings {
  int pairs{10};
  int train_cycles{40};
  int test_cycles{40};
  int checkpoint_every{5};
};

struct DragChangeSettings {
  int trials{10};
  int train_cycles{40};
  int phase_cycles{40};
  /// First entry is the training environment; later entries are switched to in order.
  std::vector<double> drag_ratios{2.0, 3.0, 4.0};
  std::vector<double> lambdas{0.99, 0.7};
  /// Adaptive error below this fraction of the frozen batch error counts as recovered.
  double recovery_ratio{0.5};
  /// Sub-cycle resolution of the recovery-time measurement.
  int bins_per_cycle{10};
};

struct OptimizeSettings {
  std::vector<int> links{3, 5, 9};
  int trials{10};
  /// Per-link cycle budgets; links not listed use optimizer.max_cycles.
  std::map<int, int> cycles_by_links{{3, 40}, {5, 60}, {9, 100}};
  /// Also stream every executed step of every trial (large).
  bool write_steps{false};
  /// Loop settings; the model block is taken from ExperimentConfig::model.
  OptimizationConfig optimizer{};

  int budget(int links) const;
};

struct SimulateSettings {
  int cycles{5};
  bool perturbed{true};
};

enum class Preset { desk, paper };

/// Fully resolved experiment description. Every result file embeds
/// to_json() of the config that produced it.
struct ExperimentConfig {
  std::string family{"accuracy"};
  SwimmerParams swimmer{};
  double seed_amplitude{0.5};
  double period{1.0};
  /// Explicit nominal gait; when absent the traveling-wave seed is used.
  std::optional<Gait> gait;
  ModelSettings model{};
  std::uint64_t seed{1};
  /// Optional explicit per-trial seeds; overrides (seed, trial) streams.
  std::vector<std::uint64_t> seeds;
  std::string output_dir{"results"};
  Execution execution{Execution::parallel};

  AccuracySettings accuracy{};
  DragChangeSettings drag_change{};
  OptimizeSettings optimize{};
  SimulateSettings simulate{};

  static ExperimentConfig preset(Preset p);

  Gait nominal_gait(int n_links) const;
  /// (key, stream) pair for trial `index`; `role` separates train/test streams.
  std::pair<std::uint64_t, std::uint64_t> trial_stream(int index, int role = 0) const;

  nlohmann::json to_json() const;
  /// Applies `j` on top of `base`. Unknown keys and invalid values raise ConfigError.
  static ExperimentConfig from_json(const nlohmann::json& j, ExperimentConfig base);
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path, ExperimentConfig base);
  static ExperimentConfig load(const std::string& path);

  void validate() const;
};

Preset preset_from_string(const std::string& name);

}  // namespace geomadapt
