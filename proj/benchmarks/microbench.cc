#include <benchmark/benchmark.h>

#include "phaserelax/bench.h"
#include "phaserelax/oracle.h"
#include "phaserelax/relax.h"
#include "phaserelax/rng.h"
#include "phaserelax/rounding.h"
#include "phaserelax/solver.h"

using namespace phaserelax;

static void BM_ProjectPsd(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const ConeBlock blk{ConeKind::kPsd, side};
  CounterRng rng(1, 0);
  VectorXd v(blk.size());
  for (auto& x : v) x = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(project_cone(v, blk));
}
BENCHMARK(BM_ProjectPsd)->Arg(10)->Arg(20)->Arg(40);

static void BM_Build(benchmark::State& state) {
  const auto inst = gen_continuous(static_cast<int>(state.range(0)), AngleMode::kNarrow, 1);
  const auto kind = static_cast<RelaxationKind>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(build_relaxation(kind, inst));
}
BENCHMARK(BM_Build)
    ->Args({10, static_cast<int>(RelaxationKind::kE1)})
    ->Args({10, static_cast<int>(RelaxationKind::kE2)})
    ->Args({20, static_cast<int>(RelaxationKind::kE2)});

static void BM_Solve(benchmark::State& state) {
  const auto inst = gen_waveform(static_cast<int>(state.range(0)), 3, 1.2, 1);
  const auto prog = build_relaxation(static_cast<RelaxationKind>(state.range(1)), inst);
  for (auto _ : state) benchmark::DoNotOptimize(solve(prog));
}
BENCHMARK(BM_Solve)
    ->Args({10, static_cast<int>(RelaxationKind::kCsdp)})
    ->Args({10, static_cast<int>(RelaxationKind::kE2)})
    ->Args({20, static_cast<int>(RelaxationKind::kCsdp)})
    ->Args({20, static_cast<int>(RelaxationKind::kE2)})
    ->Unit(benchmark::kMillisecond);

static void BM_Round(benchmark::State& state) {
  const auto inst = gen_waveform(20, 3, 1.2, 1);
  const auto b = bound_of(RelaxationKind::kE2, inst);
  RoundingOptions o;
  o.trials = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_round(b.x, inst, o));
}
BENCHMARK(BM_Round)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_Enumerate(benchmark::State& state) {
  const auto inst = gen_waveform(static_cast<int>(state.range(0)), 3, 1.0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_opt(inst));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(*search_space_size(inst)));
}
BENCHMARK(BM_Enumerate)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
