#include "homlab/mollifier.hpp"
#include "homlab/rng.hpp"

#include <benchmark/benchmark.h>

#include <array>

using namespace homlab;

static void BM_PhiloxNormals(benchmark::State& state) {
  const CounterStream stream(12345, 7);
  std::array<double, 2> out{};
  std::uint64_t step = 0;
  for (auto _ : state) {
    stream.normals(step++, StreamTag::kSpatialNoise, out);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * 2);
}
BENCHMARK(BM_PhiloxNormals);

static void BM_MollifierCumulative(benchmark::State& state) {
  const Mollifier m(MollifierSpec{});
  double z = -0.25;
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.cumulative(z));
    z = z > 0.25 ? -0.25 : z + 1e-4;
  }
}
BENCHMARK(BM_MollifierCumulative);
