// Serial reference vs OpenMP execution of the parallel kernels.

#include <benchmark/benchmark.h>

#include "geomadapt/batch_model.hpp"
#include "geomadapt/experiment.hpp"

using namespace geomadapt;

namespace {

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::parallel : Execution::serial; }

void BM_OptimizationTrials(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.output_dir.clear();
  cfg.execution = mode(state);
  cfg.optimize.links = {3};
  cfg.optimize.trials = 8;
  cfg.optimize.cycles_by_links = {{3, 10}};
  for (auto _ : state) benchmark::DoNotOptimize(run_optimization_experiment(cfg));
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}

void BM_HoldoutEvaluation(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.output_dir.clear();
  cfg.execution = mode(state);
  cfg.accuracy = {8, 10, 10, 5};
  for (auto _ : state) benchmark::DoNotOptimize(run_accuracy_experiment(cfg));
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}

void BM_FitBatch(benchmark::State& state) {
  SwimmerParams params;
  params.n_links = 9;
  const Gait gait = Gait::seed(8);
  Simulator sim(params, 200);
  auto pert = PerturbationState::for_period(8, gait.period(), 0.1, 1);
  SampleStore store(8);
  for (int c = 0; c < 20; ++c) store.append(sim.run_cycle(gait, &pert).samples);
  const auto grid = PhaseWindowGrid::with_overlap(16);
  for (auto _ : state) benchmark::DoNotOptimize(fit_batch(store, grid, gait, 4, mode(state)));
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}

}  // namespace

BENCHMARK(BM_OptimizationTrials)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HoldoutEvaluation)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FitBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
