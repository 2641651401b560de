#include "geomadapt/optimizer.hpp"

#include <cmath>
#include <numbers>

#include "geomadapt/batch_model.hpp"
#include "geomadapt/errors.hpp"
#include "geomadapt/metrics.hpp"

namespace geomadapt {

Objective objective_from_string(const std::string& name) {
  if (name == "forward") return Objective::forward;
  if (name == "lateral") return Objective::lateral;
  if (name == "rotation") return Objective::rotation;
  throw ConfigError("unknown objective '" + name + "' (expected forward, lateral or rotation)");
}

std::string to_string(Objective objective) {
  switch (objective) {
    case Objective::forward: return "forward";
    case Objective::lateral: return "lateral";
    case Objective::rotation: return "rotation";
  }
  return "forward";
}

double objective_component(const GroupElement& g, Objective objective) {
  switch (objective) {
    case Objective::forward: return g.x;
    case Objective::lateral: return g.y;
    case Objective::rotation: return g.theta;
  }
  return g.x;
}

PerturbationState ModelSettings::perturbation(int joints, double period, std::uint64_t key,
                                              std::uint64_t stream) const {
  PerturbationState base = PerturbationState::for_period(joints, period, perturbation_rms, key, stream);
  if (!sde_alpha && !sde_beta && !sde_eta) return base;
  const double alpha = sde_alpha.value_or(base.alpha);
  const double beta = sde_beta.value_or(base.beta);
  const double eta = sde_eta ? *sde_eta : perturbation_rms * std::sqrt(2.0 * alpha * beta);
  return PerturbationState(joints, alpha, beta, eta, key, stream);
}

void OptimizationConfig::validate() const {
  if (!(gamma_threshold > 0.0 && gamma_threshold < 1.0)) throw ConfigError("gamma_threshold must be in (0, 1)");
  if (!(step_size >= 0.0)) throw ConfigError("step_size must be non-negative");
  if (!(fd_epsilon > 0.0)) throw ConfigError("fd_epsilon must be positive");
  if (max_cycles < 1) throw ConfigError("max_cycles must be positive");
  if (!(amplitude_bound > 0.0)) throw ConfigError("amplitude_bound must be positive");
  if (min_cycles_per_iteration < 1) throw ConfigError("min_cycles_per_iteration must be positive");
  if (!(model.lambda_rls > 0.0 && model.lambda_rls <= 1.0)) throw ConfigError("lambda_rls must be in (0, 1]");
  if (!(model.lambda_gamma > 0.0 && model.lambda_gamma <= 1.0)) throw ConfigError("lambda_gamma must be in (0, 1]");
  if (model.steps_per_cycle < 8) throw ConfigError("steps_per_cycle must be at least 8");
  if (!(model.perturbation_rms >= 0.0)) throw ConfigError("perturbation_rms must be non-negative");
  if (model.sde_alpha && !(*model.sde_alpha > 0.0)) throw ConfigError("sde alpha must be positive");
  if (model.sde_beta && !(*model.sde_beta > 0.0)) throw ConfigError("sde beta must be positive");
  if (model.sde_eta && !(*model.sde_eta >= 0.0)) throw ConfigError("sde eta must be non-negative");
}

double TrialRecord::relative_improvement() const {
  return final_displacement / seed_displacement - 1.0;
}

int TrialRecord::cycles_to_final_gait() const {
  return iterations.empty() ? 0 : iterations.back().start_cycle;
}

std::vector<double> TrialRecord::improvement_by_cycle() const {
  std::vector<double> out(cycles_consumed, 0.0);
  for (const auto& it : iterations) {
    for (int c = it.start_cycle; c < it.end_cycle && c < cycles_consumed; ++c)
      out[c] = it.nominal_displacement / seed_displacement - 1.0;
  }
  return out;
}

double model_objective(const FilterBank& bank, const Gait& gait, int steps, Objective objective) {
  if (gait.joints() != bank.joints()) throw DimensionError("candidate gait joints differ from bank");
  if (!bank.fitted()) throw UnfittedModelError("model_objective requires a fitted bank");
  std::vector<BodyVelocity> xi(steps);
  for (int n = 0; n < steps; ++n) {
    const double phi = 2.0 * std::numbers::pi * n / steps;
    xi[n] = bank.evaluate(phi, gait.shape(phi), gait.shape_velocity(phi));
  }
  return objective_component(integrate_trajectory({}, xi, gait.period() / steps), objective);
}

Eigen::VectorXd policy_gradient(const FilterBank& bank, const Gait& gait, const OptimizationConfig& cfg) {
  const Eigen::VectorXd p = gait.parameters();
  Eigen::VectorXd grad(p.size());
  const int steps = cfg.model.steps_per_cycle;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    Eigen::VectorXd hi = p;
    Eigen::VectorXd lo = p;
    hi[i] += cfg.fd_epsilon;
    lo[i] -= cfg.fd_epsilon;
    grad[i] = (model_objective(bank, gait.with_parameters(hi), steps, cfg.objective) -
               model_objective(bank, gait.with_parameters(lo), steps, cfg.objective)) /
              (2.0 * cfg.fd_epsilon);
  }
  return grad;
}

Eigen::VectorXd project_to_box(Eigen::VectorXd p, double bound) {
  return p.cwiseMax(-bound).cwiseMin(bound);
}

double true_objective(const Gait& gait, const SwimmerParams& params, int steps_per_cycle, Objective objective) {
  return objective_component(cycle_displacement(gait, params, steps_per_cycle), objective);
}

TrialRecord optimize(const SwimmerParams& params, const Gait& seed_gait, const OptimizationConfig& cfg,
                     std::uint64_t rng_seed, const TrialSink* sink, std::uint64_t rng_stream) {
  cfg.validate();
  params.validate();
  if (seed_gait.joints() != params.joints()) throw DimensionError("seed gait joints differ from swimmer");

  const ModelSettings& ms = cfg.model;
  const PhaseWindowGrid grid = ms.grid();
  const int steps = ms.steps_per_cycle;

  Gait gait(seed_gait.coefficients(), seed_gait.period());
  gait = gait.with_parameters(project_to_box(gait.parameters(), cfg.amplitude_bound));

  Simulator sim(params, steps);
  auto perturbation = ms.perturbation(params.joints(), gait.period(), rng_seed, rng_stream);
  FilterBank bank(gait, grid, ms.bank_options());
  RecursivePhaseAverage baseline(grid, ms.lambda_rls, ms.prior_variance, ms.smoothing_order);
  GammaState gamma(ms.lambda_gamma);

  TrialRecord rec{.steps = {},
                  .iterations = {},
                  .outcome = OptimizationOutcome::gate_never_passed,
                  .seed_gait = gait,
                  .final_gait = gait,
                  .seed_displacement = true_objective(gait, params, steps, cfg.objective),
                  .final_displacement = 0.0,
                  .cycles_consumed = 0};
  rec.steps.reserve(static_cast<std::size_t>(cfg.max_cycles) * steps);

  IterationRow current;
  current.iteration = 0;
  current.start_cycle = 0;
  current.coefficients = gait.parameters();
  current.nominal_displacement = rec.seed_displacement;
  double realized_sum = 0.0;
  int iteration_cycles = 0;

  auto close_iteration = [&](bool stepped) {
    current.end_cycle = rec.cycles_consumed;
    current.gamma = gamma.value();
    current.realized_displacement = iteration_cycles > 0 ? realized_sum / iteration_cycles : 0.0;
    if (bank.fitted()) current.predicted_objective = model_objective(bank, gait, steps, cfg.objective);
    current.stepped = stepped;
    rec.iterations.push_back(current);
    if (sink && sink->on_iteration) sink->on_iteration(current);
  };

  for (int cycle = 0; cycle < cfg.max_cycles; ++cycle) {
    CycleSegment seg = sim.run_cycle(gait, &perturbation);
    for (const Sample& s : seg.samples) {
      StepRow row;
      row.iteration = current.iteration;
      row.cycle = cycle;
      row.t = s.t;
      row.phi = s.phi;
      row.r = s.r;
      row.r_dot = s.r_dot;
      row.xi = s.xi;
      row.xi_d = bank.evaluate(s.phi, s.r, s.r_dot);
      row.xi_t = baseline.predict(s.phi);
      row.gamma = gamma_update(gamma, row.xi_d, row.xi_t, s.xi);
      bank.ingest(s.phi, s.r, s.r_dot, s.xi);
      baseline.ingest(s.phi, s.xi);
      if (sink && sink->on_step) sink->on_step(row);
      rec.steps.push_back(std::move(row));
    }
    rec.cycles_consumed = cycle + 1;
    realized_sum += objective_component(compose(inverse(seg.start), seg.end), cfg.objective);
    ++iteration_cycles;

    const auto g = gamma.value();
    const bool gate = iteration_cycles >= cfg.min_cycles_per_iteration && bank.fitted() && g.has_value() &&
                      *g >= cfg.gamma_threshold;
    if (!gate || cycle + 1 == cfg.max_cycles) continue;

    rec.outcome = OptimizationOutcome::completed;
    const Eigen::VectorXd grad = policy_gradient(bank, gait, cfg);
    const double gnorm = grad.norm();
    Eigen::VectorXd next = gait.parameters();
    if (gnorm > 0.0 && std::isfinite(gnorm)) next += cfg.step_size * grad / gnorm;
    const Gait next_gait = gait.with_parameters(project_to_box(next, cfg.amplitude_bound));
    close_iteration(true);

    if (cfg.rebase_on_step) {
      bank.rebase(next_gait);
      for (int m = 0; m < grid.size(); ++m)
        baseline.set_window_value(m, {bank.filter(m, 0).weights()[0], bank.filter(m, 1).weights()[0],
                                      bank.filter(m, 2).weights()[0]});
    } else {
      bank = FilterBank(next_gait, grid, ms.bank_options());
      baseline = RecursivePhaseAverage(grid, ms.lambda_rls, ms.prior_variance, ms.smoothing_order);
    }
    gait = next_gait;
    gamma.reset();
    realized_sum = 0.0;
    iteration_cycles = 0;
    current = IterationRow{};
    current.iteration = static_cast<int>(rec.iterations.size());
    current.start_cycle = rec.cycles_consumed;
    current.coefficients = gait.parameters();
    current.nominal_displacement = true_objective(gait, params, steps, cfg.objective);
  }
  close_iteration(false);

  rec.final_gait = gait;
  rec.final_displacement = current.nominal_displacement;
  return rec;
}

}  // namespace geomadapt
