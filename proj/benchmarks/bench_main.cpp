#include "hyplab/fup.hpp"
#include "hyplab/lorentz.hpp"
#include "hyplab/porosity.hpp"

#include <benchmark/benchmark.h>

using namespace hyplab;

namespace {

BoxSet cantor(int depth, int n) {
  CantorSpec s;
  s.digits = {{0, 2}};
  s.depth = depth;
  return cantor_generate(s, n);
}

void BM_EdtSquared2D(benchmark::State& state) {
  const BoxSet x = cantor(static_cast<int>(state.range(0)), 2);
  const std::vector<int> shape{x.m, x.m};
  for (auto _ : state) benchmark::DoNotOptimize(edt_squared(x.mask, shape));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(x.mask.size()));
}
BENCHMARK(BM_EdtSquared2D)->Arg(4)->Arg(5)->Arg(6);

void BM_BallPorosity1D(benchmark::State& state) {
  const BoxSet x = cantor(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(ball_porosity_check(x, 0.1, 0.05, 1.0));
}
BENCHMARK(BM_BallPorosity1D)->Arg(7)->Arg(9)->Arg(11)->Unit(benchmark::kMillisecond);

void BM_MaskedFourierNorm(benchmark::State& state) {
  const BoxSet x = cantor(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(masked_norm(x, x).norm);
}
BENCHMARK(BM_MaskedFourierNorm)->Arg(5)->Arg(7)->Arg(9)->Unit(benchmark::kMillisecond);

void BM_KanDecompose(benchmark::State& state) {
  Rng rng(1);
  const int n = static_cast<int>(state.range(0));
  GroupElement g = random_group_element(n, rng);
  while (!is_group_element(g.matrix())) g = random_group_element(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(kan_decompose(g, Sign::Plus));
}
BENCHMARK(BM_KanDecompose)->Arg(2)->Arg(3)->Arg(4);

}  // namespace
BENCHMARK_MAIN();
