#include "dlab/verify.hpp"

#include <benchmark/benchmark.h>

using namespace dlab;

namespace {

DenseFunction random_fn(int N, int dim) {
  Rng rng(1);
  auto f = DenseFunction::zeros(N, dim);
  for (auto &v : f.v) v = cplx(rng.uniform01(), rng.uniform01());
  return f;
}

GameSpec cut_spec(int n, const Q &alpha, int K) {
  auto mu = FiniteDistribution::uniform_on(2, 2, {{0, 1}, {1, 0}});
  return make_spec(single_edge_graph(mu), n, alpha, K);
}

void BM_dft(benchmark::State &st) {
  auto f = random_fn(2, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(dft(f));
}
void BM_dft_serial(benchmark::State &st) {
  auto f = random_fn(2, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(dft_serial(f));
}

SpectralPoint point() {
  SpectralPoint z{std::vector<int>(32, 0), 1};
  z.on_universe[3] = z.on_universe[20] = 1;
  return z;
}
void BM_estimate_q(benchmark::State &st) {
  auto z = point();
  for (auto _ : st) benchmark::DoNotOptimize(estimate_q(16, 2, 4, z, 1, 1, st.range(0), 3));
}
void BM_estimate_q_serial(benchmark::State &st) {
  auto z = point();
  for (auto _ : st) benchmark::DoNotOptimize(estimate_q_serial(16, 2, 4, z, 1, 1, st.range(0), 3));
}

void BM_advantage(benchmark::State &st) {
  auto spec = cut_spec(64, frac(1, 8), 8);
  auto P = cycle_consistency_protocol(spec);
  for (auto _ : st) benchmark::DoNotOptimize(advantage_mc(P, spec, st.range(0), 5));
}
void BM_advantage_serial(benchmark::State &st) {
  auto spec = cut_spec(64, frac(1, 8), 8);
  auto P = cycle_consistency_protocol(spec);
  for (auto _ : st) benchmark::DoNotOptimize(advantage_mc_serial(P, spec, st.range(0), 5));
}

void BM_growth(benchmark::State &st) {
  auto spec = cut_spec(32, frac(1, 8), 2);
  for (auto _ : st)
    benchmark::DoNotOptimize(growth_experiment(spec, 3, Partitioner::SingleEdge, st.range(0), 7));
}
void BM_growth_serial(benchmark::State &st) {
  auto spec = cut_spec(32, frac(1, 8), 2);
  for (auto _ : st)
    benchmark::DoNotOptimize(growth_experiment_serial(spec, 3, Partitioner::SingleEdge, st.range(0), 7));
}

}  // namespace

BENCHMARK(BM_dft)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_dft_serial)->Arg(12)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_estimate_q)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_estimate_q_serial)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_advantage)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_advantage_serial)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_growth)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_growth_serial)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
