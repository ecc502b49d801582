#include <benchmark/benchmark.h>

#include "cccnet/churn.hpp"

using namespace cccnet;

// Full event-loop throughput at a modest stable size.
static void BM_EngineSteady(benchmark::State& state) {
  const uint64_t n = static_cast<uint64_t>(state.range(0));
  for (auto _ : state) {
    ChurnConfig cfg;
    cfg.n = n;
    cfg.horizon = 8.0 * double(n);
    cfg.seed = 11;
    Engine eng(cfg);
    eng.run();
    benchmark::DoNotOptimize(eng.stats().arrivals);
  }
}
BENCHMARK(BM_EngineSteady)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

static void BM_Search(benchmark::State& state) {
  ChurnConfig cfg;
  cfg.n = 5000;
  cfg.horizon = 10.0 * 5000;
  cfg.seed = 11;
  Engine eng(cfg);
  eng.run();
  for (int i = 0; i < 256; ++i) eng.insert_random_key(eng.now());
  for (auto _ : state) benchmark::DoNotOptimize(eng.search_random_key());
}
BENCHMARK(BM_Search);

BENCHMARK_MAIN();
