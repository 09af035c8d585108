#include <benchmark/benchmark.h>

#include <numbers>

#include "quantfix/asymptotics.hpp"
#include "quantfix/oracle.hpp"
#include "quantfix/oscillator.hpp"

using namespace quantfix;

static void BM_ApplyT(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto prob = build_problem(2, Parity::EVEN);
  OperatorConfig cfg;
  cfg.truncation = n;
  const auto x = seed(prob, n);
  for (auto _ : state) benchmark::DoNotOptimize(apply_T(x, prob.q, prob.kernel, cfg));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ApplyT)->Arg(125)->Arg(250)->Arg(500)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond)->Complexity();

static void BM_DtMatrix(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto prob = build_problem(2, Parity::EVEN);
  OperatorConfig cfg;
  cfg.truncation = n;
  const auto x = seed(prob, n);
  const auto y = apply_T(x, prob.q, prob.kernel, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(dt_matrix(x, y, prob.kernel, cfg));
}
BENCHMARK(BM_DtMatrix)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_Oracle(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(oracle::hamiltonian_eigs(2, count, oracle::OracleConfig{}));
}
BENCHMARK(BM_Oracle)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_DriftIntegral(benchmark::State& state) {
  const KernelParams p(std::numbers::pi / 3);
  for (auto _ : state) benchmark::DoNotOptimize(drift_integral(1.5, p));
}
BENCHMARK(BM_DriftIntegral);

static void BM_SIntegral(benchmark::State& state) {
  const KernelParams p(std::numbers::pi / 3);
  for (auto _ : state) benchmark::DoNotOptimize(s_integral(0.5, p));
}
BENCHMARK(BM_SIntegral);

BENCHMARK_MAIN();
