#include <benchmark/benchmark.h>

#include "cccnet/label.hpp"
#include "cccnet/hash.hpp"
#include "cccnet/rng.hpp"

using namespace cccnet;

static void BM_BitFixRoute(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  Rng rng(7);
  for (auto _ : state) {
    const VertexLabel a = random_label(dim, rng);
    const VertexLabel b = random_label(dim, rng);
    benchmark::DoNotOptimize(bit_fix_route(a, b));
  }
}
BENCHMARK(BM_BitFixRoute)->Arg(6)->Arg(9)->Arg(12);

static void BM_Neighbors(benchmark::State& state) {
  Rng rng(7);
  const VertexLabel v = random_label(9, rng);
  for (auto _ : state) benchmark::DoNotOptimize(neighbors(v));
}
BENCHMARK(BM_Neighbors);

static void BM_HashKey(benchmark::State& state) {
  uint64_t k = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(hash_key(key_bytes(++k), 9));
}
BENCHMARK(BM_HashKey);
