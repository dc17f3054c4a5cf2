#include <benchmark/benchmark.h>

#include "fixtures.hpp"

using namespace alm;

namespace {

HedgeProblem sample(bool exponential, int dates, int branch, bool rn, Style style) {
  std::mt19937_64 rng(11);
  const fx::TreeShape sh{dates, branch, branch, rn};
  return exponential ? fx::random_exponential_problem(rng, sh, style) : fx::random_call_problem(rng, sh, style);
}

// state.range(0): dates, range(1): branching
void BM_OracleCallLP(benchmark::State& state) {
  const HedgeProblem p = sample(false, state.range(0), state.range(1), false, Style::TC);
  for (auto _ : state) benchmark::DoNotOptimize(solve_oracle(p).v0);
  state.counters["nodes"] = static_cast<double>(p.tree.size());
}
BENCHMARK(BM_OracleCallLP)->Args({2, 3})->Args({3, 3})->Args({3, 5})->Unit(benchmark::kMillisecond);

void BM_OracleExponentialBarrier(benchmark::State& state) {
  const HedgeProblem p = sample(true, state.range(0), state.range(1), false, Style::TC);
  for (auto _ : state) benchmark::DoNotOptimize(solve_oracle(p).v0);
  state.counters["nodes"] = static_cast<double>(p.tree.size());
}
BENCHMARK(BM_OracleExponentialBarrier)->Args({2, 3})->Args({3, 3})->Args({3, 5})->Unit(benchmark::kMillisecond);

void BM_TcGeneral(benchmark::State& state) {
  const HedgeProblem p = sample(true, state.range(0), state.range(1), false, Style::TC);
  for (auto _ : state) benchmark::DoNotOptimize(tc_solve_general(p).v0);
  state.counters["nodes"] = static_cast<double>(p.tree.size());
}
BENCHMARK(BM_TcGeneral)->Args({2, 3})->Args({3, 3})->Args({3, 5})->Args({4, 6})->Unit(benchmark::kMicrosecond);

void BM_TcRiskNeutral(benchmark::State& state) {
  const HedgeProblem p = sample(false, state.range(0), state.range(1), true, Style::TC);
  for (auto _ : state) benchmark::DoNotOptimize(tc_solve_riskneutral(p).v0);
}
BENCHMARK(BM_TcRiskNeutral)->Args({3, 3})->Args({4, 6})->Unit(benchmark::kMicrosecond);

void BM_EuExponential(benchmark::State& state) {
  const HedgeProblem p = sample(true, 2, state.range(0), false, Style::EU);
  for (auto _ : state) benchmark::DoNotOptimize(eu_exponential_n2(p).v0);
}
BENCHMARK(BM_EuExponential)->Arg(3)->Arg(10)->Unit(benchmark::kMicrosecond);

void BM_LookbackSmooth(benchmark::State& state) {
  const HedgeProblem p = sample(true, 2, state.range(0), false, Style::LB);
  for (auto _ : state) benchmark::DoNotOptimize(lb_value_n2(p).v0);
}
BENCHMARK(BM_LookbackSmooth)->Arg(3)->Arg(10)->Unit(benchmark::kMicrosecond);

void BM_StoppingTimeCheck(benchmark::State& state) {
  const HedgeProblem p = sample(false, 3, 2, true, Style::TC);
  const AdaptedProcess M = solve_oracle(p).wealth;
  for (auto _ : state) benchmark::DoNotOptimize(check_american_equivalence(p, M, 0.0, 100000).holds);
}
BENCHMARK(BM_StoppingTimeCheck)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
