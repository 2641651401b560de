// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if all pass.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "geomadapt/adaptive_model.hpp"
#include "geomadapt/experiment.hpp"
#include "geomadapt/metrics.hpp"
#include "geomadapt/report.hpp"
#include "geomadapt/se2.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace geomadapt;
using support::kPi;

namespace {

struct Outcome {
  bool pass{false};
  std::string detail;
};

std::string str(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string opt(const std::optional<double>& v) { return v ? str(*v) : std::string("never"); }

SwimmerParams swimmer(int links, double k) {
  SwimmerParams p;
  p.n_links = links;
  p.drag_ratio = k;
  return p;
}

ExperimentConfig base_config(const std::string& out, const std::string& family) {
  ExperimentConfig cfg = ExperimentConfig::preset(Preset::desk);
  cfg.family = family;
  cfg.output_dir = out.empty() ? std::string() : join_path(out, family);
  return cfg;
}

// 1. Filter-bank weights at lambda = 1 against per-window regularized normal equations.
Outcome rls_oracle() {
  std::mt19937_64 rng(1001);
  const Gait nominal = Gait::seed(2);
  const auto grid = PhaseWindowGrid::with_overlap(16);
  const double prior = 1e3;
  FilterBank bank(nominal, grid, {1.0, prior, 4});
  const auto p = swimmer(3, 2.0);
  std::vector<std::vector<Eigen::VectorXd>> xs(grid.size());
  std::vector<std::vector<std::array<double, 3>>> ys(grid.size());
  for (int i = 0; i < 1000; ++i) {
    const double phi = support::uniform(rng, 0, 2 * kPi);
    const Eigen::VectorXd r = nominal.shape(phi) + support::random_vector(rng, 2, 0.2);
    const Eigen::VectorXd rd = nominal.shape_velocity(phi) + support::random_vector(rng, 2, 1.0);
    const BodyVelocity xi = body_velocity(r, rd, p);
    bank.ingest(phi, r, rd, xi);
    for (int m : covering_windows(grid, phi)) {
      const auto c = nominal_shape(nominal, grid.center(m));
      xs[m].push_back(build_regressor(r - c.r, rd - c.r_dot));
      ys[m].push_back({xi[0], xi[1], xi[2]});
    }
  }
  double worst = 0.0;
  for (int m = 0; m < grid.size(); ++m) {
    for (int k = 0; k < kOutputs; ++k) {
      std::vector<double> y;
      for (const auto& v : ys[m]) y.push_back(v[k]);
      const Eigen::VectorXd want = oracle::weighted_normal_equations(xs[m], y, 1.0, prior);
      const Eigen::VectorXd& got = bank.filter(m, k).weights();
      worst = std::max(worst, (got - want).norm() / want.norm());
    }
  }
  return {worst < 1e-8, "max relative weight error " + str(worst) + " (tol 1e-8) over 16 windows x 3 outputs"};
}

// 2. Centroid displacement under isotropic drag.
Outcome null_physics() {
  std::mt19937_64 rng(1002);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const Gait g = support::random_gait(rng, 2, 3, 0.4, support::uniform(rng, 0.5, 2.0));
    worst = std::max(worst, centroid_cycle_displacement(g, swimmer(3, 1.0)).norm());
  }
  return {worst < 1e-5, "max centroid displacement per cycle " + str(worst) + " link lengths (tol 1e-5), 20 gaits"};
}

// 3. Analytic connection against the quadrature force-balance oracle.
Outcome connection_oracle() {
  std::mt19937_64 rng(1003);
  std::string detail;
  bool pass = true;
  for (int links : {3, 5, 9}) {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double k = support::uniform(rng, 1.0, 6.0);
      const Eigen::VectorXd r = support::random_vector(rng, links - 1, 1.0);
      const Eigen::MatrixXd want = oracle::quadrature_connection(r, links, 1.0, 1.0, k);
      const Eigen::MatrixXd got = local_connection(r, swimmer(links, k));
      worst = std::max(worst, (got - want).norm() / want.norm());
    }
    pass &= worst < 1e-6;
    detail += std::to_string(links) + "-link max rel error " + str(worst) + "; ";
  }
  return {pass, detail + "tol 1e-6, 100 (r, k) pairs each"};
}

// 4. Holdout gamma after little experience, and parity with the batch model.
Outcome rapid_learning(const std::string& out) {
  ExperimentConfig cfg = base_config(out, "accuracy");
  cfg.swimmer = swimmer(3, 2.0);
  cfg.accuracy = {20, 40, 40, 5};
  const auto r = run_accuracy_experiment(cfg);
  const std::size_t c5 = r.checkpoint_index(5);
  const std::size_t c40 = r.checkpoint_index(40);
  const double early = percentile(r.adaptive[c5], 50);
  const double late_a = percentile(r.adaptive[c40], 50);
  const double late_b = percentile(r.batch[c40], 50);
  const bool pass = early > 0.4 && std::abs(late_a - late_b) <= 0.15;
  return {pass, "median gamma at 5 cycles " + str(early) + " (> 0.4); at 40 cycles adaptive " + str(late_a) +
                    " vs batch " + str(late_b) + " (|diff| <= 0.15), 20 pairs"};
}

// 5. Recovery ordering after unannounced drag changes.
Outcome substrate_adaptation(const std::string& out) {
  ExperimentConfig cfg = base_config(out, "drag-change");
  cfg.drag_change.trials = 20;
  cfg.drag_change.drag_ratios = {2.0, 3.0, 4.0};
  cfg.drag_change.lambdas = {0.99, 0.7};
  const auto r = run_drag_change_experiment(cfg);
  bool pass = true;
  bool strictly_faster_once = false;
  std::string detail;
  for (int phase = 0; phase < 2; ++phase) {
    const auto& slow = r.find("adaptive_lambda_0.99", phase);
    const auto& fast = r.find("adaptive_lambda_0.7", phase);
    pass &= slow.crossing_cycles && *slow.crossing_cycles <= 10.0;
    pass &= fast.crossing_cycles && slow.crossing_cycles && *fast.crossing_cycles <= *slow.crossing_cycles;
    if (fast.crossing_cycles && slow.crossing_cycles && *fast.crossing_cycles < *slow.crossing_cycles)
      strictly_faster_once = true;
    detail += "k=" + str(slow.drag_ratio) + ": cycles to 50% of batch error, lambda 0.99 " + opt(slow.crossing_cycles) +
              ", lambda 0.7 " + opt(fast.crossing_cycles) + "; ";
  }
  pass &= strictly_faster_once;
  return {pass, detail + "rule: 0.99 within 10 cycles, 0.7 <= 0.99 at every switch and < at one or more"};
}

Outcome optimization(const std::string& out, int links, int cycles, bool nine_link) {
  ExperimentConfig cfg = base_config(out, "optimize");
  cfg.optimize.links = {links};
  cfg.optimize.trials = 20;
  cfg.optimize.cycles_by_links = {{links, cycles}};
  if (!cfg.output_dir.empty()) cfg.output_dir = join_path(cfg.output_dir, std::to_string(links) + "link");
  const auto r = run_optimization_experiment(cfg);
  const auto imp = r.improvements(links);
  const double median = percentile(imp, 50);
  const double p75 = percentile(imp, 75);
  const double to_final = percentile(r.cycles_to_final(links), 50);
  if (!nine_link)
    return {median >= 0.30, "median improvement " + str(100 * median) + "% (>= 30%), 20 seeds, 40 cycles"};
  return {p75 >= 0.60 && to_final < 150.0, "top-quartile improvement " + str(100 * p75) + "% (>= 60%), median " +
                                                  str(100 * median) + "%, median cycles to final gait " +
                                                  str(to_final) + " (< 150), 20 seeds, 100 cycles"};
}

// 8. Headline invariants, each over 1000 randomized cases.
Outcome properties() {
  const int n = support::kCases;
  std::mt19937_64 rng(1008);
  std::vector<std::string> failed;

  double group = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto g = support::random_pose(rng), h = support::random_pose(rng), k = support::random_pose(rng);
    group = std::max({group, support::pose_distance(compose(compose(g, h), k), compose(g, compose(h, k))),
                      support::pose_distance(compose(g, inverse(g)), {})});
  }
  if (group > 1e-12) failed.push_back("SE(2) group laws");

  bool pd = true;
  for (double lambda : {0.9, 0.99, 1.0}) {
    RlsFilter f(9, lambda);
    for (int i = 0; i < n; ++i) {
      f.update(support::random_vector(rng, 9, 1.0), support::uniform(rng, -1, 1));
      pd &= Eigen::LLT<Eigen::MatrixXd>(f.covariance()).info() == Eigen::Success;
    }
  }
  if (!pd) failed.push_back("RLS covariance positive definite");

  double gamma_gap = 0.0;
  for (int i = 0; i < n; ++i) {
    const int len = 1 + static_cast<int>(rng() % 40);
    std::vector<BodyVelocity> d(len), t(len), x(len);
    GammaState st(1.0);
    std::optional<double> rec;
    for (int k = 0; k < len; ++k) {
      d[k] = support::random_twist(rng);
      t[k] = support::random_twist(rng);
      x[k] = support::random_twist(rng);
      rec = gamma_update(st, d[k], t[k], x[k]);
    }
    gamma_gap = std::max(gamma_gap, std::abs(*rec - *gamma_batch(d, t, x)));
  }
  if (gamma_gap > 1e-12) failed.push_back("gamma recursive/batch agreement");

  bool preserved = true;
  const auto grid = PhaseWindowGrid::with_overlap(8);
  for (int i = 0; i < n; ++i) {
    FilterBank bank(support::random_gait(rng, 2, 1, 0.4), grid, {0.99, 1e3, 3});
    for (int s = 0; s < 40; ++s)
      bank.ingest(support::uniform(rng, 0, 2 * kPi), support::random_vector(rng, 2, 0.5),
                  support::random_vector(rng, 2, 1.0), support::random_twist(rng));
    FilterBank moved = bank;
    moved.rebase(support::random_gait(rng, 2, 1, 0.4));
    for (int m = 0; m < grid.size(); ++m)
      for (int k = 0; k < kOutputs; ++k) {
        const auto& a = bank.filter(m, k);
        const auto& b = moved.filter(m, k);
        preserved &= a.covariance() == b.covariance();
        preserved &= a.weights().tail(a.weights().size() - 1) == b.weights().tail(b.weights().size() - 1);
      }
  }
  if (!preserved) failed.push_back("rebase block preservation");

  OptimizationConfig oc;
  oc.max_cycles = 6;
  const auto a = optimize(swimmer(3, 2.0), Gait::seed(2), oc, 77, nullptr, 5);
  const auto b = optimize(swimmer(3, 2.0), Gait::seed(2), oc, 77, nullptr, 5);
  bool same = a.steps.size() == b.steps.size() && a.final_gait == b.final_gait;
  for (std::size_t i = 0; same && i < a.steps.size(); ++i)
    same = a.steps[i].r == b.steps[i].r && a.steps[i].gamma == b.steps[i].gamma;
  if (!same) failed.push_back("end-to-end determinism");

  std::string detail = "group laws, RLS PD (3 lambdas), gamma agreement, rebase preservation: " +
                       std::to_string(n) + " cases each; determinism: 2 identical optimizer runs";
  if (!failed.empty()) {
    detail += "; failed:";
    for (const auto& f : failed) detail += " " + f;
  }
  return {failed.empty(), detail + "; full suites in unit_tests"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string out;
  std::vector<int> only;
  app.add_option("--out", out, "Write experiment result files under this directory");
  app.add_option("--only", only, "Run only these criterion numbers");
  CLI11_PARSE(app, argc, argv);

  struct Criterion {
    int id;
    std::string name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "RLS matches regularized normal equations", 10, rls_oracle},
      {2, "isotropic drag gives no centroid displacement", 30, null_physics},
      {3, "connection matches quadrature oracle", 60, connection_oracle},
      {4, "rapid learning", 300, [&] { return rapid_learning(out); }},
      {5, "substrate adaptation", 300, [&] { return substrate_adaptation(out); }},
      {6, "3-link optimization", 600, [&] { return optimization(out, 3, 40, false); }},
      {7, "9-link sample efficiency", 1800, [&] { return optimization(out, 9, 100, true); }},
      {8, "property suites", 600, properties},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s criterion %d (%s): %s; %.1f s (limit %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), secs, c.limit_s);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
