#include <benchmark/benchmark.h>

#include "alm/experiment.hpp"

using namespace alm::experiment;

namespace {

void BM_AlmostSureQuadrature(benchmark::State& state) {
  LognormalModel m;
  m.samples = 0;
  m.quadrature_nodes = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(almost_sure_cost(m).pathwise);
}
BENCHMARK(BM_AlmostSureQuadrature)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_CurvesQuadrature(benchmark::State& state) {
  LognormalModel m;
  m.samples = 0;
  m.alpha2_grid = default_alpha2_grid();
  for (auto _ : state) benchmark::DoNotOptimize(riskneutral_curves(m).points.size());
}
BENCHMARK(BM_CurvesQuadrature)->Unit(benchmark::kMillisecond);

// full figure at the default sample count
void BM_CurvesMonteCarlo(benchmark::State& state) {
  LognormalModel m;
  m.samples = static_cast<std::size_t>(state.range(0));
  m.alpha2_grid = default_alpha2_grid();
  for (auto _ : state) benchmark::DoNotOptimize(riskneutral_curves(m).points.size());
}
BENCHMARK(BM_CurvesMonteCarlo)->Arg(100000)->Arg(1000000)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
