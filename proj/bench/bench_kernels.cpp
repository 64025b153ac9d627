// Serial reference path against the OpenMP path for the enumeration-heavy
// kernels. Arg 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include "knightian/arena.hpp"
#include "knightian/kernels.hpp"
#include "knightian/mixture.hpp"
#include "knightian/sophistication.hpp"

using namespace knightian;

namespace {

const toyvm::MachineConfig kCfg{256, 16, 64};

kernels::Exec policy(const benchmark::State& st) {
  return st.range(0) ? kernels::Exec::Parallel : kernels::Exec::Serial;
}

void label(benchmark::State& st) { st.SetLabel(st.range(0) ? "parallel" : "serial"); }

void BM_RunAll(benchmark::State& st) {
  const auto programs = toyvm::enumerate(20);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::run_all(programs, kCfg, policy(st)));
  st.SetItemsProcessed(static_cast<std::int64_t>(st.iterations() * programs.size()));
  label(st);
}
BENCHMARK(BM_RunAll)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MixtureBuild(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(prior::Mixture::build(18, kCfg, policy(st)));
  label(st);
}
BENCHMARK(BM_MixtureBuild)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MixtureUpdate(benchmark::State& st) {
  const auto m = prior::Mixture::build(18, kCfg);
  for (auto _ : st) {
    auto x = m;
    for (int i = 0; i < 8; ++i) x = x.update(static_cast<std::uint8_t>(i & 1), policy(st));
    benchmark::DoNotOptimize(x);
  }
  label(st);
}
BENCHMARK(BM_MixtureUpdate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Omega(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(prior::omega_truncated(20, kCfg, policy(st)));
  label(st);
}
BENCHMARK(BM_Omega)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Tabulator(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(soph::Tabulator(20, kCfg, policy(st)));
  label(st);
}
BENCHMARK(BM_Tabulator)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RunGame(benchmark::State& st) {
  arena::GameConfig g;
  g.t = 256;
  g.u = 260;
  g.trials = 200;
  const auto noisy = arena::library::noisy_class();
  const auto p = arena::bayes_family_predictor(noisy.members);
  for (auto _ : st) benchmark::DoNotOptimize(arena::run_game(arena::library::sticky_coin(0.8), p, g, policy(st)));
  label(st);
}
BENCHMARK(BM_RunGame)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
