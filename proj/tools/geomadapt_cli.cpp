#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "geomadapt/errors.hpp"
#include "geomadapt/experiment.hpp"
#include "geomadapt/report.hpp"

using namespace geomadapt;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kNumerical = 3, kIo = 4 };

struct Overrides {
  std::string config;
  std::string preset{"desk"};
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> links;
  std::optional<int> cycles;
  bool serial{false};
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON experiment config; flags override its values");
  cmd->add_option("--preset", o.preset, "Base preset the config is applied on")->check(CLI::IsMember({"desk", "paper"}));
  cmd->add_option("--seed", o.seed, "Base seed (Philox key)");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--links", o.links, "Number of swimmer links")->check(CLI::PositiveNumber);
  cmd->add_option("--cycles", o.cycles, "Cycle count for the selected experiment")->check(CLI::PositiveNumber);
  cmd->add_flag("--serial", o.serial, "Run trials serially");
}

ExperimentConfig resolve(const std::string& family, const Overrides& o) {
  ExperimentConfig cfg = ExperimentConfig::preset(preset_from_string(o.preset));
  if (!o.config.empty()) cfg = ExperimentConfig::load(o.config, cfg);
  cfg.family = family;
  if (o.seed) {
    cfg.seed = *o.seed;
    cfg.seeds.clear();
  }
  if (o.out) cfg.output_dir = *o.out;
  if (o.serial) cfg.execution = Execution::serial;
  if (o.links) {
    cfg.swimmer.n_links = *o.links;
    cfg.optimize.links = {*o.links};
  }
  if (o.cycles) {
    if (family == "accuracy") {
      cfg.accuracy.train_cycles = *o.cycles;
      cfg.accuracy.checkpoint_every = std::min(cfg.accuracy.checkpoint_every, *o.cycles);
    } else if (family == "drag-change") {
      cfg.drag_change.phase_cycles = *o.cycles;
    } else if (family == "optimize") {
      cfg.optimize.optimizer.max_cycles = *o.cycles;
      cfg.optimize.cycles_by_links.clear();
    } else {
      cfg.simulate.cycles = *o.cycles;
    }
  }
  cfg.validate();
  return cfg;
}

void report(const std::vector<std::string>& warnings, const std::vector<std::string>& files) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& f : files) std::cout << "wrote " << f << '\n';
}

int run(const std::string& family, const Overrides& o) {
  const ExperimentConfig cfg = resolve(family, o);
  if (family == "accuracy") {
    const auto r = run_accuracy_experiment(cfg);
    report(r.warnings, r.files);
    for (std::size_t c = 0; c < r.checkpoints.size(); ++c)
      std::printf("cycles %3d  median gamma adaptive %.3f  batch %.3f\n", r.checkpoints[c],
                  percentile(r.adaptive[c], 50.0), percentile(r.batch[c], 50.0));
  } else if (family == "drag-change") {
    const auto r = run_drag_change_experiment(cfg);
    report(r.warnings, r.files);
    for (const auto& rec : r.recovery)
      std::printf("phase %d (k=%g) %-22s crossing %-4s settled %-4s steady median log error %.3f\n", rec.phase,
                  rec.drag_ratio, rec.model.c_str(), rec.crossing_cycles ? fmt(*rec.crossing_cycles).c_str() : "-",
                  rec.settled_cycles ? fmt(*rec.settled_cycles).c_str() : "-", rec.steady_median);
  } else if (family == "optimize") {
    const auto r = run_optimization_experiment(cfg);
    report(r.warnings, r.files);
    for (int n : r.links) {
      const auto imp = r.improvements(n);
      std::printf("%d-link: improvement median %.3f  p75 %.3f  median cycles to final gait %.1f\n", n,
                  percentile(imp, 50.0), percentile(imp, 75.0), percentile(r.cycles_to_final(n), 50.0));
    }
  } else {
    const auto r = run_simulation(cfg);
    report({}, r.files);
    const auto& g = r.poses.back();
    std::printf("final pose x %.6f y %.6f theta %.6f\n", g.x, g.y, g.theta);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive geometric-mechanics swimmer experiments"};
  app.require_subcommand(1);
  Overrides o;
  const std::pair<const char*, const char*> commands[] = {
      {"accuracy", "Adaptive vs batch prediction quality against training experience"},
      {"drag-change", "Model recovery after unannounced drag-ratio changes"},
      {"optimize", "Confidence-gated gait optimization across seeds and link counts"},
      {"simulate", "Dump a single simulated trajectory"},
  };
  for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    return run(app.get_subcommands().front()->get_name(), o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const DimensionError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIo;
  } catch (const RankDeficientError& e) {
    std::cerr << "numerical failure: " << e.what() << " (window " << e.window() << ")\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
}
