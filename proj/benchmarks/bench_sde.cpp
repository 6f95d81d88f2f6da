#include "homlab/media.hpp"
#include "homlab/sde.hpp"

#include <benchmark/benchmark.h>

using namespace homlab;

namespace {

void run_steps(benchmark::State& state, const MediumInstance& medium) {
  SdeConfig config;
  config.dt = 1e-3;
  config.horizon = 1.0;
  config.seed = 99;
  Vec start = Vec::Constant(medium.dim(), 0.3);
  PathStepper stepper(medium, config, start);
  for (auto _ : state) {
    stepper.step();
    benchmark::DoNotOptimize(stepper.state().data());
  }
  state.SetItemsProcessed(state.iterations());
}

}  // namespace

static void BM_StepConstant(benchmark::State& state) { run_steps(state, make_constant_medium(Mat::Identity(2, 2))); }
BENCHMARK(BM_StepConstant);

static void BM_StepPeriodic(benchmark::State& state) { run_steps(state, make_periodic_medium(1.0, {})); }
BENCHMARK(BM_StepPeriodic);

static void BM_StepChessboard(benchmark::State& state) {
  run_steps(state, make_chessboard_medium(0.5, {}, 5, {1 << 20, 1 << 20, 1 << 20}, false));
}
BENCHMARK(BM_StepChessboard);
