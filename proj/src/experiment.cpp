#include "geomadapt/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "geomadapt/batch_model.hpp"
#include "geomadapt/errors.hpp"
#include "geomadapt/metrics.hpp"
#include "geomadapt/parallel.hpp"
#include "geomadapt/report.hpp"

namespace geomadapt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string color(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

std::vector<Sample> run_cycles(Simulator& sim, const Gait& gait, PerturbationState* pert, int cycles) {
  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(cycles) * sim.steps_per_cycle());
  for (int c = 0; c < cycles; ++c) {
    CycleSegment seg = sim.run_cycle(gait, pert);
    std::move(seg.samples.begin(), seg.samples.end(), std::back_inserter(out));
  }
  return out;
}

std::vector<std::string> trial_lines(const ExperimentConfig& cfg, int trial, std::uint64_t key,
                                     std::uint64_t stream) {
  auto lines = provenance_lines(cfg);
  lines.push_back("trial: " + std::to_string(trial) + " key: " + std::to_string(key) +
                  " stream: " + std::to_string(stream));
  return lines;
}

std::string lambda_label(double lambda) { return "adaptive_lambda_" + fmt(lambda); }

double median_of(std::vector<double> v) { return percentile(std::move(v), 50.0); }

double variance_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

std::vector<std::string> provenance_lines(const ExperimentConfig& cfg) {
  std::string seed_line = "seed: " + std::to_string(cfg.seed);
  if (!cfg.seeds.empty()) {
    seed_line += " seeds:";
    for (auto s : cfg.seeds) seed_line += " " + std::to_string(s);
  }
  return {"geomadapt " + cfg.family + " results", "rng: philox4x32-10", seed_line,
          "config: " + cfg.to_json().dump()};
}

std::size_t AccuracyResult::checkpoint_index(int cycles) const {
  const auto it = std::find(checkpoints.begin(), checkpoints.end(), cycles);
  if (it == checkpoints.end()) throw ConfigError("no accuracy checkpoint at " + std::to_string(cycles) + " cycles");
  return static_cast<std::size_t>(it - checkpoints.begin());
}

AccuracyResult run_accuracy_experiment(const ExperimentConfig& base) {
  ExperimentConfig cfg = base;
  cfg.family = "accuracy";
  cfg.validate();
  const auto& acc = cfg.accuracy;
  const SwimmerParams params = cfg.swimmer;
  const Gait gait = cfg.nominal_gait(params.n_links);
  const PhaseWindowGrid grid = cfg.model.grid();
  const int steps = cfg.model.steps_per_cycle;
  const int joints = params.joints();

  AccuracyResult res;
  for (int n = acc.checkpoint_every; n <= acc.train_cycles; n += acc.checkpoint_every) res.checkpoints.push_back(n);
  const std::size_t n_pairs = static_cast<std::size_t>(acc.pairs);
  res.adaptive.assign(res.checkpoints.size(), std::vector<double>(n_pairs, kNaN));
  res.batch.assign(res.checkpoints.size(), std::vector<double>(n_pairs, kNaN));
  std::vector<std::vector<std::string>> pair_warnings(n_pairs);

  const bool silent = cfg.model.perturbation(joints, gait.period(), 0).eta == 0.0;
  if (silent)
    res.warnings.push_back(
        "degenerate regression: perturbation eta is 0, so samples carry no off-cycle excitation and the shape "
        "terms of the model are unidentifiable");

  for_each_index(n_pairs, cfg.execution, [&](std::size_t p) {
    const int pi = static_cast<int>(p);
    const auto [train_key, train_stream] = cfg.trial_stream(pi, 0);
    const auto [test_key, test_stream] = cfg.trial_stream(pi, 1);

    Simulator train_sim(params, steps);
    auto train_pert = cfg.model.perturbation(joints, gait.period(), train_key, train_stream);
    const auto train = run_cycles(train_sim, gait, &train_pert, acc.train_cycles);
    Simulator test_sim(params, steps);
    auto test_pert = cfg.model.perturbation(joints, gait.period(), test_key, test_stream);
    const auto test = run_cycles(test_sim, gait, &test_pert, acc.test_cycles);

    std::vector<BodyVelocity> truth(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) truth[i] = test[i].xi;

    FilterBank bank(gait, grid, cfg.model.bank_options());
    SampleStore store(joints);
    std::size_t next = 0;
    for (std::size_t c = 0; c < res.checkpoints.size(); ++c) {
      const std::size_t until = static_cast<std::size_t>(res.checkpoints[c]) * steps;
      for (; next < until; ++next) {
        const Sample& s = train[next];
        bank.ingest(s.phi, s.r, s.r_dot, s.xi);
        store.append(s);
      }
      std::vector<BodyVelocity> pred_t(test.size());
      std::vector<BodyVelocity> pred_d(test.size());
      try {
        const PhaseAverageModel baseline = fit_phase_average(store, grid, cfg.model.smoothing_order);
        for (std::size_t i = 0; i < test.size(); ++i) pred_t[i] = baseline.predict(test[i].phi);
      } catch (const UnfittedModelError& e) {
        pair_warnings[p].push_back("pair " + std::to_string(p) + " at " + std::to_string(res.checkpoints[c]) +
                                   " cycles: " + e.what());
        continue;
      }
      if (bank.fitted()) {
        for (std::size_t i = 0; i < test.size(); ++i) pred_d[i] = bank.predict(test[i].phi, test[i].r, test[i].r_dot);
        res.adaptive[c][p] = gamma_batch(pred_d, pred_t, truth).value_or(kNaN);
      }
      try {
        const BatchModel batch = fit_batch(store, grid, gait, cfg.model.smoothing_order);
        for (std::size_t i = 0; i < test.size(); ++i) pred_d[i] = batch.predict(test[i].phi, test[i].r, test[i].r_dot);
        res.batch[c][p] = gamma_batch(pred_d, pred_t, truth).value_or(kNaN);
      } catch (const RankDeficientError& e) {
        if (!silent)
          pair_warnings[p].push_back("pair " + std::to_string(p) + " at " + std::to_string(res.checkpoints[c]) +
                                     " cycles: batch fit failed in window " + std::to_string(e.window()));
      }
    }
  });
  for (auto& w : pair_warnings) res.warnings.insert(res.warnings.end(), w.begin(), w.end());

  if (cfg.output_dir.empty()) return res;
  ensure_directory(cfg.output_dir);
  const auto header = provenance_lines(cfg);
  {
    CsvFile f(join_path(cfg.output_dir, "accuracy_gamma.csv"), header,
              "pair,train_key,train_stream,test_key,test_stream,cycles,adaptive_gamma,batch_gamma");
    for (std::size_t p = 0; p < n_pairs; ++p) {
      const auto [tk, ts] = cfg.trial_stream(static_cast<int>(p), 0);
      const auto [vk, vs] = cfg.trial_stream(static_cast<int>(p), 1);
      for (std::size_t c = 0; c < res.checkpoints.size(); ++c)
        f.row({std::to_string(p), std::to_string(tk), std::to_string(ts), std::to_string(vk), std::to_string(vs),
               std::to_string(res.checkpoints[c]), fmt(res.adaptive[c][p]), fmt(res.batch[c][p])});
    }
    f.close();
    res.files.push_back(f.path());
  }
  std::vector<BoxStats> box_a;
  std::vector<BoxStats> box_b;
  {
    CsvFile f(join_path(cfg.output_dir, "accuracy_percentiles.csv"), header, "cycles,model,p5,p25,p50,p75,p95");
    for (std::size_t c = 0; c < res.checkpoints.size(); ++c) {
      box_a.push_back(box_stats(res.adaptive[c]));
      box_b.push_back(box_stats(res.batch[c]));
      for (const auto& [name, b] : {std::pair{"adaptive", box_a.back()}, std::pair{"batch", box_b.back()}})
        f.row({std::to_string(res.checkpoints[c]), name, fmt(b.p5), fmt(b.p25), fmt(b.p50), fmt(b.p75),
               fmt(b.p95)});
    }
    f.close();
    res.files.push_back(f.path());
  }
  std::vector<std::string> categories;
  for (int n : res.checkpoints) categories.push_back(std::to_string(n));
  const std::string path = join_path(cfg.output_dir, "accuracy_boxplot.svg");
  write_text_file(path, svg::box_plot({"Holdout prediction quality", "training cycles", "gamma", {}}, categories,
                                      {{"adaptive", color(0), box_a}, {"batch", color(1), box_b}}));
  res.files.push_back(path);
  return res;
}

const DragRecovery& DragChangeResult::find(const std::string& model, int phase) const {
  for (const auto& r : recovery)
    if (r.model == model && r.phase == phase) return r;
  throw ConfigError("no recovery entry for " + model + " in phase " + std::to_string(phase));
}

DragChangeResult run_drag_change_experiment(const ExperimentConfig& base) {
  ExperimentConfig cfg = base;
  cfg.family = "drag-change";
  cfg.validate();
  const auto& dc = cfg.drag_change;
  SwimmerParams params = cfg.swimmer;
  params.drag_ratio = dc.drag_ratios.front();
  const Gait gait = cfg.nominal_gait(params.n_links);
  const PhaseWindowGrid grid = cfg.model.grid();
  const int steps = cfg.model.steps_per_cycle;
  const int joints = params.joints();

  DragChangeResult res;
  res.steps_per_cycle = steps;
  res.phase_cycles = dc.phase_cycles;
  if (dc.drag_ratios.size() > 1) res.phase_ratios.assign(dc.drag_ratios.begin() + 1, dc.drag_ratios.end());
  else res.phase_ratios = dc.drag_ratios;
  for (double l : dc.lambdas) res.models.push_back(lambda_label(l));
  res.models.push_back("frozen_batch");
  const std::size_t n_models = res.models.size();
  const std::size_t n_adaptive = dc.lambdas.size();
  const std::size_t n_trials = static_cast<std::size_t>(dc.trials);
  const std::size_t stream_len = res.phase_ratios.size() * static_cast<std::size_t>(dc.phase_cycles) * steps;
  res.log_error.assign(n_models, std::vector<std::vector<double>>(n_trials));

  for_each_index(n_trials, cfg.execution, [&](std::size_t t) {
    const auto [key, stream] = cfg.trial_stream(static_cast<int>(t), 0);
    Simulator sim(params, steps);
    auto pert = cfg.model.perturbation(joints, gait.period(), key, stream);
    std::vector<FilterBank> banks;
    for (double l : dc.lambdas) {
      FilterBankOptions opt = cfg.model.bank_options();
      opt.lambda_rls = l;
      banks.emplace_back(gait, grid, opt);
    }
    SampleStore store(joints);
    for (const Sample& s : run_cycles(sim, gait, &pert, dc.train_cycles)) {
      for (auto& b : banks) b.ingest(s.phi, s.r, s.r_dot, s.xi);
      store.append(s);
    }
    const BatchModel batch = fit_batch(store, grid, gait, cfg.model.smoothing_order);
    for (auto& m : res.log_error) m[t].reserve(stream_len);
    for (double k : res.phase_ratios) {
      sim.set_drag_ratio(k);
      for (const Sample& s : run_cycles(sim, gait, &pert, dc.phase_cycles)) {
        for (std::size_t i = 0; i < n_adaptive; ++i) {
          res.log_error[i][t].push_back(std::log(norm(banks[i].predict(s.phi, s.r, s.r_dot) - s.xi)));
          banks[i].ingest(s.phi, s.r, s.r_dot, s.xi);
        }
        res.log_error[n_adaptive][t].push_back(std::log(norm(batch.predict(s.phi, s.r, s.r_dot) - s.xi)));
      }
    }
  });

  const std::size_t phase_len = static_cast<std::size_t>(dc.phase_cycles) * steps;
  const std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(steps / dc.bins_per_cycle));
  const double log_ratio = std::log(dc.recovery_ratio);
  auto pooled = [&](std::size_t model, std::size_t from, std::size_t to) {
    std::vector<double> v;
    v.reserve((to - from) * n_trials);
    for (std::size_t t = 0; t < n_trials; ++t)
      v.insert(v.end(), res.log_error[model][t].begin() + static_cast<std::ptrdiff_t>(from),
               res.log_error[model][t].begin() + static_cast<std::ptrdiff_t>(to));
    return v;
  };
  const std::size_t steady_len =
      static_cast<std::size_t>(std::min(10, std::max(1, dc.phase_cycles / 2))) * static_cast<std::size_t>(steps);
  for (std::size_t ph = 0; ph < res.phase_ratios.size(); ++ph) {
    const std::size_t start = ph * phase_len;
    const std::size_t end = start + phase_len;
    std::vector<double> batch_bins;
    for (std::size_t s = start; s + stride <= end; s += stride) batch_bins.push_back(median_of(pooled(n_adaptive, s, s + stride)));
    for (std::size_t m = 0; m < n_models; ++m) {
      DragRecovery r;
      r.phase = static_cast<int>(ph);
      r.drag_ratio = res.phase_ratios[ph];
      r.model = res.models[m];
      if (m < n_adaptive) {
        bool below = false;
        std::size_t b = 0;
        for (std::size_t s = start; s + stride <= end; s += stride, ++b) {
          below = median_of(pooled(m, s, s + stride)) < batch_bins[b] + log_ratio;
          const double t_end = static_cast<double>(s + stride - start) / steps;
          if (below && !r.crossing_cycles) r.crossing_cycles = t_end;
          if (!below) r.settled_cycles.reset();
          else if (!r.settled_cycles) r.settled_cycles = t_end;
        }
        if (!below) r.settled_cycles.reset();
      }
      const auto steady = pooled(m, end - steady_len, end);
      r.steady_median = median_of(steady);
      r.steady_variance = variance_of(steady);
      res.recovery.push_back(r);
    }
  }

  if (cfg.output_dir.empty()) return res;
  ensure_directory(cfg.output_dir);
  const auto header = provenance_lines(cfg);
  std::string model_cols;
  for (const auto& m : res.models) model_cols += ",log_error_" + m;
  {
    CsvFile f(join_path(cfg.output_dir, "drag_change_errors.csv"), header,
              "trial,key,stream,sample,cycle,drag_ratio" + model_cols);
    for (std::size_t t = 0; t < n_trials; ++t) {
      const auto [key, stream] = cfg.trial_stream(static_cast<int>(t), 0);
      for (std::size_t i = 0; i < stream_len; ++i) {
        std::vector<std::string> row{std::to_string(t), std::to_string(key), std::to_string(stream),
                                     std::to_string(i), fmt(static_cast<double>(i) / steps),
                                     fmt(res.phase_ratios[i / phase_len])};
        for (std::size_t m = 0; m < n_models; ++m) row.push_back(fmt(res.log_error[m][t][i]));
        f.row(row);
      }
    }
    f.close();
    res.files.push_back(f.path());
  }
  std::vector<svg::Series> series(n_models);
  for (std::size_t m = 0; m < n_models; ++m) series[m] = {res.models[m], color(m), {}, {}};
  {
    CsvFile f(join_path(cfg.output_dir, "drag_change_median.csv"), header,
              "bin,cycle,drag_ratio" + model_cols);
    for (std::size_t s = 0, bin = 0; s + stride <= stream_len; s += stride, ++bin) {
      const double cycle = static_cast<double>(s) / steps;
      std::vector<std::string> row{std::to_string(bin), fmt(cycle), fmt(res.phase_ratios[s / phase_len])};
      for (std::size_t m = 0; m < n_models; ++m) {
        const double med = median_of(pooled(m, s, s + stride));
        row.push_back(fmt(med));
        series[m].x.push_back(cycle);
        series[m].y.push_back(med);
      }
      f.row(row);
    }
    f.close();
    res.files.push_back(f.path());
  }
  {
    CsvFile f(join_path(cfg.output_dir, "drag_change_recovery.csv"), header,
              "phase,drag_ratio,model,crossing_cycles,settled_cycles,steady_median_log_error,"
              "steady_log_error_variance");
    for (const auto& r : res.recovery)
      f.row({std::to_string(r.phase), fmt(r.drag_ratio), r.model,
             r.crossing_cycles ? fmt(*r.crossing_cycles) : std::string(),
             r.settled_cycles ? fmt(*r.settled_cycles) : std::string(), fmt(r.steady_median),
             fmt(r.steady_variance)});
    f.close();
    res.files.push_back(f.path());
  }
  svg::Axes axes{"Prediction error across drag changes", "cycles after training", "median log prediction error",
                 {}};
  for (std::size_t ph = 1; ph < res.phase_ratios.size(); ++ph)
    axes.x_markers.push_back(static_cast<double>(ph * dc.phase_cycles));
  const std::string path = join_path(cfg.output_dir, "drag_change_error.svg");
  write_text_file(path, svg::line_plot(axes, series));
  res.files.push_back(path);
  return res;
}

std::string iteration_csv_header(int parameters) {
  std::string h =
      "iteration,start_cycle,end_cycle,gamma,predicted_objective,realized_displacement,nominal_displacement,stepped";
  for (int i = 0; i < parameters; ++i) h += ",p_" + std::to_string(i);
  return h;
}

std::string step_csv_header(int joints) {
  std::string h = "iteration,cycle,t,phi";
  for (int j = 1; j <= joints; ++j) h += ",r_" + std::to_string(j);
  for (int j = 1; j <= joints; ++j) h += ",rdot_" + std::to_string(j);
  for (const char* p : {"xi", "xid", "xit"})
    for (const char* c : {"_x", "_y", "_theta"}) h += std::string(",") + p + c;
  return h + ",gamma";
}

std::vector<double> OptimizationResult::improvements(int n) const {
  std::vector<double> out;
  for (const auto& t : trials)
    if (t.links == n) out.push_back(t.record.relative_improvement());
  return out;
}

std::vector<double> OptimizationResult::cycles_to_final(int n) const {
  std::vector<double> out;
  for (const auto& t : trials)
    if (t.links == n) out.push_back(t.record.cycles_to_final_gait());
  return out;
}

OptimizationResult run_optimization_experiment(const ExperimentConfig& base) {
  ExperimentConfig cfg = base;
  cfg.family = "optimize";
  cfg.validate();
  const auto& os = cfg.optimize;
  const bool write = !cfg.output_dir.empty();
  if (write) ensure_directory(cfg.output_dir);

  OptimizationResult res;
  res.links = os.links;
  for (int n : os.links)
    for (int t = 0; t < os.trials; ++t) {
      OptimizationTrial tr;
      tr.links = n;
      tr.trial = t;
      std::tie(tr.key, tr.stream) = cfg.trial_stream(t, 0);
      res.trials.push_back(std::move(tr));
    }

  for_each_index(res.trials.size(), cfg.execution, [&](std::size_t i) {
    OptimizationTrial& tr = res.trials[i];
    SwimmerParams params = cfg.swimmer;
    params.n_links = tr.links;
    const Gait seed = cfg.nominal_gait(tr.links);
    OptimizationConfig oc = os.optimizer;
    oc.model = cfg.model;
    oc.max_cycles = os.budget(tr.links);

    const std::string stem = "optimize_" + std::to_string(tr.links) + "link_trial" + std::to_string(tr.trial);
    std::unique_ptr<CsvFile> iter_csv;
    std::unique_ptr<CsvFile> step_csv;
    TrialSink sink;
    if (write) {
      const auto lines = trial_lines(cfg, tr.trial, tr.key, tr.stream);
      iter_csv = std::make_unique<CsvFile>(join_path(cfg.output_dir, stem + "_iterations.csv"), lines,
                                           iteration_csv_header(static_cast<int>(seed.parameters().size())));
      sink.on_iteration = [&](const IterationRow& it) {
        std::vector<std::string> row{std::to_string(it.iteration),
                                     std::to_string(it.start_cycle),
                                     std::to_string(it.end_cycle),
                                     it.gamma ? fmt(*it.gamma) : "nan",
                                     it.predicted_objective ? fmt(*it.predicted_objective) : "nan",
                                     fmt(it.realized_displacement),
                                     fmt(it.nominal_displacement),
                                     it.stepped ? "1" : "0"};
        for (Eigen::Index k = 0; k < it.coefficients.size(); ++k) row.push_back(fmt(it.coefficients[k]));
        iter_csv->row(row);
        iter_csv->flush();
      };
      if (os.write_steps) {
        step_csv = std::make_unique<CsvFile>(join_path(cfg.output_dir, stem + "_steps.csv"), lines,
                                             step_csv_header(seed.joints()));
        sink.on_step = [&](const StepRow& s) {
          std::vector<std::string> row{std::to_string(s.iteration), std::to_string(s.cycle), fmt(s.t), fmt(s.phi)};
          for (Eigen::Index k = 0; k < s.r.size(); ++k) row.push_back(fmt(s.r[k]));
          for (Eigen::Index k = 0; k < s.r_dot.size(); ++k) row.push_back(fmt(s.r_dot[k]));
          for (const BodyVelocity* v : {&s.xi, &s.xi_d, &s.xi_t})
            for (int k = 0; k < 3; ++k) row.push_back(fmt((*v)[k]));
          row.push_back(s.gamma ? fmt(*s.gamma) : "nan");
          step_csv->row(row);
          if (s.phi == 0.0) step_csv->flush();
        };
      }
    }
    tr.record = optimize(params, seed, oc, tr.key, write ? &sink : nullptr, tr.stream);
    tr.record.steps.clear();
    tr.record.steps.shrink_to_fit();
    if (iter_csv) iter_csv->close();
    if (step_csv) step_csv->close();
  });

  for (const auto& tr : res.trials)
    if (tr.record.outcome == OptimizationOutcome::gate_never_passed)
      res.warnings.push_back(std::to_string(tr.links) + "-link trial " + std::to_string(tr.trial) +
                             ": confidence gate never passed");
  if (!write) return res;

  for (const auto& tr : res.trials) {
    const std::string stem = "optimize_" + std::to_string(tr.links) + "link_trial" + std::to_string(tr.trial);
    res.files.push_back(join_path(cfg.output_dir, stem + "_iterations.csv"));
    if (os.write_steps) res.files.push_back(join_path(cfg.output_dir, stem + "_steps.csv"));
  }
  const auto header = provenance_lines(cfg);
  {
    CsvFile f(join_path(cfg.output_dir, "optimization_summary.csv"), header,
              "links,trial,key,stream,outcome,seed_displacement,final_displacement,relative_improvement,"
              "cycles_to_final_gait,iterations,cycles_consumed");
    for (const auto& tr : res.trials) {
      const auto& r = tr.record;
      f.row({std::to_string(tr.links), std::to_string(tr.trial), std::to_string(tr.key), std::to_string(tr.stream),
             r.outcome == OptimizationOutcome::completed ? "completed" : "gate_never_passed",
             fmt(r.seed_displacement), fmt(r.final_displacement), fmt(r.relative_improvement()),
             std::to_string(r.cycles_to_final_gait()), std::to_string(r.iterations.size()),
             std::to_string(r.cycles_consumed)});
    }
    f.close();
    res.files.push_back(f.path());
  }
  {
    CsvFile f(join_path(cfg.output_dir, "optimization_percentiles.csv"), header,
              "links,cycle,p5,p25,p50,p75,p95");
    for (int n : res.links) {
      const int budget = os.budget(n);
      svg::Series median{"median", color(0), {}, {}};
      svg::Band inner{color(0), 0.35, {}, {}, {}};
      svg::Band outer{color(0), 0.15, {}, {}, {}};
      for (int c = 0; c < budget; ++c) {
        std::vector<double> v;
        for (const auto& tr : res.trials) {
          if (tr.links != n) continue;
          const auto by_cycle = tr.record.improvement_by_cycle();
          if (c < static_cast<int>(by_cycle.size())) v.push_back(by_cycle[c]);
        }
        const BoxStats b = box_stats(v);
        f.row({std::to_string(n), std::to_string(c), fmt(b.p5), fmt(b.p25), fmt(b.p50), fmt(b.p75), fmt(b.p95)});
        median.x.push_back(c);
        median.y.push_back(b.p50);
        for (auto* band : {&inner, &outer}) band->x.push_back(c);
        inner.lo.push_back(b.p25);
        inner.hi.push_back(b.p75);
        outer.lo.push_back(b.p5);
        outer.hi.push_back(b.p95);
      }
      const std::string path = join_path(cfg.output_dir, "optimization_progress_" + std::to_string(n) + "link.svg");
      write_text_file(path, svg::line_plot({std::to_string(n) + "-link gait optimization", "cycles",
                                            "relative improvement", {}},
                                           {median}, {outer, inner}));
      res.files.push_back(path);
    }
    f.close();
    res.files.push_back(f.path());
  }
  return res;
}

SimulationResult run_simulation(const ExperimentConfig& base) {
  ExperimentConfig cfg = base;
  cfg.family = "simulate";
  cfg.validate();
  const SwimmerParams params = cfg.swimmer;
  const Gait gait = cfg.nominal_gait(params.n_links);
  const int steps = cfg.model.steps_per_cycle;
  const auto [key, stream] = cfg.trial_stream(0, 0);

  SimulationResult res;
  Simulator sim(params, steps);
  auto pert = cfg.model.perturbation(params.joints(), gait.period(), key, stream);
  for (int c = 0; c < cfg.simulate.cycles; ++c) {
    CycleSegment seg = sim.run_cycle(gait, cfg.simulate.perturbed ? &pert : nullptr);
    res.samples.insert(res.samples.end(), seg.samples.begin(), seg.samples.end());
    res.poses.insert(res.poses.end(), seg.poses.begin(), seg.poses.end());
  }
  res.poses.push_back(sim.pose());

  if (cfg.output_dir.empty()) return res;
  ensure_directory(cfg.output_dir);
  const auto header = trial_lines(cfg, 0, key, stream);
  {
    const std::string path = join_path(cfg.output_dir, "simulate_samples.csv");
    std::ofstream out(path);
    if (!out) throw IoError(path, "cannot open for writing");
    for (const auto& line : header) out << "# " << line << '\n';
    SampleStore store(params.joints());
    store.append(res.samples);
    store.write_csv(out);
    out.close();
    if (out.fail()) throw IoError(path, "write failed");
    res.files.push_back(path);
  }
  {
    CsvFile f(join_path(cfg.output_dir, "simulate_poses.csv"), header, "step,t,x,y,theta");
    for (std::size_t i = 0; i < res.poses.size(); ++i) {
      const auto& g = res.poses[i];
      f.row({std::to_string(i), fmt(static_cast<double>(i) * gait.period() / steps), fmt(g.x), fmt(g.y),
             fmt(g.theta)});
    }
    f.close();
    res.files.push_back(f.path());
  }
  return res;
}

}  // namespace geomadapt
