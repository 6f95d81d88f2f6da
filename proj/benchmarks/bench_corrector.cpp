#include "homlab/corrector.hpp"
#include "homlab/media.hpp"

#include <benchmark/benchmark.h>

using namespace homlab;

static void BM_AssembleOperator(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto disc = CellDiscretization::for_medium(make_periodic_medium(1.0, {}), {1, n, n});
  for (auto _ : state) {
    auto op = assemble_apply(disc, 1e-3, 0.0, 1);
    benchmark::DoNotOptimize(op.weak_matrix().nonZeros());
  }
}
BENCHMARK(BM_AssembleOperator)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_SolveCorrector(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto disc = CellDiscretization::for_medium(make_elliptic2d_medium(0.3, 0.5), {1, n, n});
  for (auto _ : state) {
    auto sol = solve_corrector(disc, 0, 1e-3, 0.0, 1, {});
    benchmark::DoNotOptimize(sol.h1);
  }
}
BENCHMARK(BM_SolveCorrector)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
