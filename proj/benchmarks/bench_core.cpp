#include <benchmark/benchmark.h>

#include "gmop/analysis.hpp"
#include "gmop/belief.hpp"
#include "gmop/experiment.hpp"
#include "gmop/linalg.hpp"

using namespace gmop;

static void BM_BayesUpdate(benchmark::State& state) {
  std::vector<Mode> modes;
  for (int i = 0; i < state.range(0); ++i) modes.push_back({0.1 * i, 1.0 + 0.1 * i, 1.0 / static_cast<double>(state.range(0))});
  const GaussianMixture prior(modes);
  double y = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bayes_update(prior, y, 0.1));
    y = -y;
  }
}
BENCHMARK(BM_BayesUpdate)->Arg(1)->Arg(2)->Arg(8);

static PreparedRun sized_run(std::size_t n) {
  SimulationConfig c = preset_config("S1");
  c.network.n = n;
  c.network.hub_node.reset();
  return prepare_run(c);
}

static void BM_Step(benchmark::State& state) {
  const PreparedRun run = sized_run(static_cast<std::size_t>(state.range(0)));
  Rng rng = substream(1, "observations");
  PopulationState s = run.initial;
  for (auto _ : state) {
    s = step(s, run.model, rng).next;
    benchmark::DoNotOptimize(s.mean.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Step)->Arg(50)->Arg(500)->Arg(5000);

static void BM_SpectralRadius(benchmark::State& state) {
  const PreparedRun run = sized_run(static_cast<std::size_t>(state.range(0)));
  const Eigen::MatrixXd a = build_system_matrices(run.model.graph, run.coupling).A;
  const auto method = state.range(1) ? SpectralMethod::Subspace : SpectralMethod::Dense;
  for (auto _ : state) benchmark::DoNotOptimize(spectral_radius(a, method));
}
BENCHMARK(BM_SpectralRadius)->Args({50, 0})->Args({200, 0})->Args({200, 1})->Args({800, 1});

static void BM_CentralitySweep(benchmark::State& state) {
  const PreparedRun run = sized_run(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sweep_centrality(run.model.graph, run.coupling, -1.0, 1.0));
  }
}
BENCHMARK(BM_CentralitySweep)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
