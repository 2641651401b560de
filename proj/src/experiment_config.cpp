#include "geomadapt/experiment_config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <string_view>

#include "geomadapt/errors.hpp"

namespace geomadapt {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <class T>
void read_optional(const json& j, const char* key, std::optional<T>& out, const std::string& where) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    out.reset();
    return;
  }
  T v{};
  read(j, key, v, where);
  out = v;
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

int OptimizeSettings::budget(int links) const {
  const auto it = cycles_by_links.find(links);
  return it == cycles_by_links.end() ? optimizer.max_cycles : it->second;
}

ExperimentConfig ExperimentConfig::preset(Preset p) {
  ExperimentConfig c;
  if (p == Preset::paper) {
    c.accuracy.pairs = 100;
    c.drag_change.trials = 20;
    c.optimize.trials = 50;
  }
  return c;
}

Preset preset_from_string(const std::string& name) {
  if (name == "desk") return Preset::desk;
  if (name == "paper") return Preset::paper;
  throw ConfigError("unknown preset '" + name + "' (expected desk or paper)");
}

Gait ExperimentConfig::nominal_gait(int n_links) const {
  if (gait) {
    if (gait->joints() != n_links - 1)
      throw ConfigError("configured gait has " + std::to_string(gait->joints()) + " joints but the swimmer has " +
                        std::to_string(n_links - 1));
    return *gait;
  }
  return Gait::seed(n_links - 1, seed_amplitude, period);
}

std::pair<std::uint64_t, std::uint64_t> ExperimentConfig::trial_stream(int index, int role) const {
  const auto stream = static_cast<std::uint64_t>(role) << 32;
  if (!seeds.empty()) return {seeds.at(static_cast<std::size_t>(index)), stream};
  return {seed, stream | static_cast<std::uint64_t>(index)};
}

json ExperimentConfig::to_json() const {
  json j;
  j["family"] = family;
  j["seed"] = seed;
  j["seeds"] = seeds;
  j["output_dir"] = output_dir;
  j["execution"] = execution == Execution::parallel ? "parallel" : "serial";
  j["swimmer"] = {{"n_links", swimmer.n_links},
                  {"link_length", swimmer.link_length},
                  {"c_tangential", swimmer.c_tangential},
                  {"drag_ratio", swimmer.drag_ratio}};
  j["gait"] = {{"amplitude", seed_amplitude}, {"period", period}};
  if (gait) j["gait"]["coefficients"] = gait_to_json(*gait)["coefficients"];
  j["model"] = {{"windows", model.windows},
                {"overlap", model.overlap},
                {"lambda_rls", model.lambda_rls},
                {"lambda_gamma", model.lambda_gamma},
                {"prior_variance", model.prior_variance},
                {"smoothing_order", model.smoothing_order},
                {"steps_per_cycle", model.steps_per_cycle}};
  j["perturbation"] = {{"rms", model.perturbation_rms},
                       {"alpha", optional_json(model.sde_alpha)},
                       {"beta", optional_json(model.sde_beta)},
                       {"eta", optional_json(model.sde_eta)}};
  j["accuracy"] = {{"pairs", accuracy.pairs},
                   {"train_cycles", accuracy.train_cycles},
                   {"test_cycles", accuracy.test_cycles},
                   {"checkpoint_every", accuracy.checkpoint_every}};
  j["drag_change"] = {{"trials", drag_change.trials},
                      {"train_cycles", drag_change.train_cycles},
                      {"phase_cycles", drag_change.phase_cycles},
                      {"drag_ratios", drag_change.drag_ratios},
                      {"lambdas", drag_change.lambdas},
                      {"recovery_ratio", drag_change.recovery_ratio},
                      {"bins_per_cycle", drag_change.bins_per_cycle}};
  json budgets = json::object();
  for (const auto& [links, cycles] : optimize.cycles_by_links) budgets[std::to_string(links)] = cycles;
  const auto& oc = optimize.optimizer;
  j["optimize"] = {{"links", optimize.links},
                   {"trials", optimize.trials},
                   {"cycles_by_links", budgets},
                   {"max_cycles", oc.max_cycles},
                   {"gamma_threshold", oc.gamma_threshold},
                   {"step_size", oc.step_size},
                   {"fd_epsilon", oc.fd_epsilon},
                   {"objective", to_string(oc.objective)},
                   {"amplitude_bound", oc.amplitude_bound},
                   {"min_cycles_per_iteration", oc.min_cycles_per_iteration},
                   {"rebase_on_step", oc.rebase_on_step},
                   {"write_steps", optimize.write_steps}};
  j["simulate"] = {{"cycles", simulate.cycles}, {"perturbed", simulate.perturbed}};
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j, ExperimentConfig c) {
  check_keys(j, "config",
             {"family", "seed", "seeds", "output_dir", "execution", "swimmer", "gait", "model", "perturbation",
              "accuracy", "drag_change", "optimize", "simulate"});
  read(j, "family", c.family, "config");
  read(j, "seed", c.seed, "config");
  read(j, "seeds", c.seeds, "config");
  read(j, "output_dir", c.output_dir, "config");
  if (j.contains("execution")) {
    std::string e;
    read(j, "execution", e, "config");
    if (e == "parallel") c.execution = Execution::parallel;
    else if (e == "serial") c.execution = Execution::serial;
    else throw ConfigError("config.execution must be 'serial' or 'parallel'");
  }
  if (j.contains("swimmer")) {
    const json& s = j["swimmer"];
    check_keys(s, "swimmer", {"n_links", "link_length", "c_tangential", "drag_ratio"});
    read(s, "n_links", c.swimmer.n_links, "swimmer");
    read(s, "link_length", c.swimmer.link_length, "swimmer");
    read(s, "c_tangential", c.swimmer.c_tangential, "swimmer");
    read(s, "drag_ratio", c.swimmer.drag_ratio, "swimmer");
  }
  if (j.contains("gait")) {
    const json& g = j["gait"];
    check_keys(g, "gait", {"amplitude", "period", "coefficients"});
    read(g, "amplitude", c.seed_amplitude, "gait");
    read(g, "period", c.period, "gait");
    if (g.contains("coefficients")) {
      if (g["coefficients"].is_null()) {
        c.gait.reset();
      } else {
        try {
          c.gait = gait_from_json({{"period", c.period}, {"coefficients", g["coefficients"]}});
        } catch (const std::exception& e) {
          throw ConfigError(std::string("gait.coefficients: ") + e.what());
        }
      }
    }
  }
  if (j.contains("model")) {
    const json& m = j["model"];
    check_keys(m, "model",
               {"windows", "overlap", "lambda_rls", "lambda_gamma", "prior_variance", "smoothing_order",
                "steps_per_cycle"});
    read(m, "windows", c.model.windows, "model");
    read(m, "overlap", c.model.overlap, "model");
    read(m, "lambda_rls", c.model.lambda_rls, "model");
    read(m, "lambda_gamma", c.model.lambda_gamma, "model");
    read(m, "prior_variance", c.model.prior_variance, "model");
    read(m, "smoothing_order", c.model.smoothing_order, "model");
    read(m, "steps_per_cycle", c.model.steps_per_cycle, "model");
  }
  if (j.contains("perturbation")) {
    const json& p = j["perturbation"];
    check_keys(p, "perturbation", {"rms", "alpha", "beta", "eta"});
    read(p, "rms", c.model.perturbation_rms, "perturbation");
    read_optional(p, "alpha", c.model.sde_alpha, "perturbation");
    read_optional(p, "beta", c.model.sde_beta, "perturbation");
    read_optional(p, "eta", c.model.sde_eta, "perturbation");
  }
  if (j.contains("accuracy")) {
    const json& a = j["accuracy"];
    check_keys(a, "accuracy", {"pairs", "train_cycles", "test_cycles", "checkpoint_every"});
    read(a, "pairs", c.accuracy.pairs, "accuracy");
    read(a, "train_cycles", c.accuracy.train_cycles, "accuracy");
    read(a, "test_cycles", c.accuracy.test_cycles, "accuracy");
    read(a, "checkpoint_every", c.accuracy.checkpoint_every, "accuracy");
  }
  if (j.contains("drag_change")) {
    const json& d = j["drag_change"];
    check_keys(d, "drag_change",
               {"trials", "train_cycles", "phase_cycles", "drag_ratios", "lambdas", "recovery_ratio",
                "bins_per_cycle"});
    read(d, "trials", c.drag_change.trials, "drag_change");
    read(d, "train_cycles", c.drag_change.train_cycles, "drag_change");
    read(d, "phase_cycles", c.drag_change.phase_cycles, "drag_change");
    read(d, "drag_ratios", c.drag_change.drag_ratios, "drag_change");
    read(d, "lambdas", c.drag_change.lambdas, "drag_change");
    read(d, "recovery_ratio", c.drag_change.recovery_ratio, "drag_change");
    read(d, "bins_per_cycle", c.drag_change.bins_per_cycle, "drag_change");
  }
  if (j.contains("optimize")) {
    const json& o = j["optimize"];
    check_keys(o, "optimize",
               {"links", "trials", "cycles_by_links", "max_cycles", "gamma_threshold", "step_size", "fd_epsilon",
                "objective", "amplitude_bound", "min_cycles_per_iteration", "rebase_on_step", "write_steps"});
    auto& oc = c.optimize.optimizer;
    read(o, "links", c.optimize.links, "optimize");
    read(o, "trials", c.optimize.trials, "optimize");
    if (o.contains("cycles_by_links")) {
      const json& b = o["cycles_by_links"];
      if (!b.is_object()) throw ConfigError("optimize.cycles_by_links must be an object");
      c.optimize.cycles_by_links.clear();
      for (const auto& [key, value] : b.items()) {
        int links = 0;
        try {
          std::size_t used = 0;
          links = std::stoi(key, &used);
          if (used != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
          throw ConfigError("optimize.cycles_by_links key '" + key + "' is not a link count");
        }
        if (!value.is_number_integer()) throw ConfigError("optimize.cycles_by_links values must be integers");
        c.optimize.cycles_by_links[links] = value.get<int>();
      }
    }
    read(o, "max_cycles", oc.max_cycles, "optimize");
    read(o, "gamma_threshold", oc.gamma_threshold, "optimize");
    read(o, "step_size", oc.step_size, "optimize");
    read(o, "fd_epsilon", oc.fd_epsilon, "optimize");
    if (o.contains("objective")) {
      std::string name;
      read(o, "objective", name, "optimize");
      oc.objective = objective_from_string(name);
    }
    read(o, "amplitude_bound", oc.amplitude_bound, "optimize");
    read(o, "min_cycles_per_iteration", oc.min_cycles_per_iteration, "optimize");
    read(o, "rebase_on_step", oc.rebase_on_step, "optimize");
    read(o, "write_steps", c.optimize.write_steps, "optimize");
  }
  if (j.contains("simulate")) {
    const json& s = j["simulate"];
    check_keys(s, "simulate", {"cycles", "perturbed"});
    read(s, "cycles", c.simulate.cycles, "simulate");
    read(s, "perturbed", c.simulate.perturbed, "simulate");
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) { return from_json(j, ExperimentConfig{}); }

ExperimentConfig ExperimentConfig::load(const std::string& path) { return load(path, ExperimentConfig{}); }

ExperimentConfig ExperimentConfig::load(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open config file");
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return from_json(j, std::move(base));
}

void ExperimentConfig::validate() const {
  static constexpr std::string_view families[] = {"accuracy", "drag-change", "optimize", "simulate"};
  if (std::find(std::begin(families), std::end(families), family) == std::end(families))
    throw ConfigError("unknown experiment family '" + family + "'");
  try {
    swimmer.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("swimmer: ") + e.what());
  }
  if (!(seed_amplitude >= 0.0)) throw ConfigError("gait.amplitude must be non-negative");
  if (!(period > 0.0)) throw ConfigError("gait.period must be positive");
  if (gait && gait->joints() != swimmer.joints())
    throw ConfigError("gait.coefficients must have one row per joint (n_links - 1)");
  if (model.windows < 3) throw ConfigError("model.windows must be at least 3");
  if (!(model.overlap >= 1.0)) throw ConfigError("model.overlap must be at least 1");
  if (!(model.prior_variance > 0.0)) throw ConfigError("model.prior_variance must be positive");
  if (model.smoothing_order < 0 || model.smoothing_order > model.windows / 2 - 1)
    throw ConfigError("model.smoothing_order must be in [0, windows/2 - 1]");
  OptimizationConfig oc = optimize.optimizer;
  oc.model = model;
  oc.validate();

  if (accuracy.pairs < 1 || accuracy.train_cycles < 1 || accuracy.test_cycles < 1 || accuracy.checkpoint_every < 1)
    throw ConfigError("accuracy counts must be positive");
  if (accuracy.checkpoint_every > accuracy.train_cycles)
    throw ConfigError("accuracy.checkpoint_every exceeds train_cycles");
  if (drag_change.trials < 1 || drag_change.train_cycles < 1 || drag_change.phase_cycles < 1)
    throw ConfigError("drag_change counts must be positive");
  if (drag_change.drag_ratios.empty()) throw ConfigError("drag_change.drag_ratios must not be empty");
  for (double k : drag_change.drag_ratios)
    if (!(k > 0.0)) throw ConfigError("drag_change.drag_ratios must be positive");
  if (drag_change.lambdas.empty()) throw ConfigError("drag_change.lambdas must not be empty");
  for (double l : drag_change.lambdas)
    if (!(l > 0.0 && l <= 1.0)) throw ConfigError("drag_change.lambdas must be in (0, 1]");
  if (!(drag_change.recovery_ratio > 0.0)) throw ConfigError("drag_change.recovery_ratio must be positive");
  if (drag_change.bins_per_cycle < 1) throw ConfigError("drag_change.bins_per_cycle must be positive");
  if (optimize.links.empty()) throw ConfigError("optimize.links must not be empty");
  for (int n : optimize.links)
    if (n < 2) throw ConfigError("optimize.links entries must be at least 2");
  for (const auto& [links, cycles] : optimize.cycles_by_links)
    if (cycles < 1) throw ConfigError("optimize.cycles_by_links values must be positive");
  if (optimize.trials < 1) throw ConfigError("optimize.trials must be positive");
  if (simulate.cycles < 1) throw ConfigError("simulate.cycles must be positive");

  if (!seeds.empty()) {
    const std::size_t need = family == "accuracy"      ? static_cast<std::size_t>(accuracy.pairs)
                             : family == "drag-change" ? static_cast<std::size_t>(drag_change.trials)
                             : family == "optimize"    ? static_cast<std::size_t>(optimize.trials)
                                                       : 1;
    if (seeds.size() < need)
      throw ConfigError("seeds lists " + std::to_string(seeds.size()) + " entries but " + std::to_string(need) +
                        " trials are configured");
  }
}

}  // namespace geomadapt
