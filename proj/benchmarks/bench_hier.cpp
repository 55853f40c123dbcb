#include <benchmark/benchmark.h>

#include <random>

#include "crunchsim/hier.hpp"

using namespace crunchsim;

static void BM_HierSet(benchmark::State& state) {
  DirtyRowTree tree(2048, 16);
  std::mt19937_64 rng(1);
  for (auto _ : state) {
    const uint32_t row = uint32_t(rng() % 2048);
    tree.set(row, rng() & 1);
  }
}
BENCHMARK(BM_HierSet);

// enumeration cost versus dirty-row density; 2048 rows, arity 16
static void BM_HierEnumerate(benchmark::State& state) {
  DirtyRowTree tree(2048, 16);
  std::mt19937_64 rng(2);
  const uint32_t dirty = uint32_t(state.range(0));
  for (uint32_t placed = 0; placed < dirty;) {
    const uint32_t row = uint32_t(rng() % 2048);
    if (!tree.leaf(row)) {
      tree.set(row, true);
      ++placed;
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(tree.enumerate());
  state.counters["visited"] = double(tree.enumerate().nodes_visited);
}
BENCHMARK(BM_HierEnumerate)->Arg(0)->Arg(20)->Arg(200)->Arg(2048);

// the walk it replaces: scanning every leaf
static void BM_FullLeafScan(benchmark::State& state) {
  DirtyRowTree tree(2048, 16);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) tree.set(uint32_t(rng() % 2048), true);
  for (auto _ : state) {
    std::vector<uint32_t> rows;
    for (uint32_t r = 0; r < 2048; ++r)
      if (tree.leaf(r)) rows.push_back(r);
    benchmark::DoNotOptimize(rows);
  }
}
BENCHMARK(BM_FullLeafScan);

BENCHMARK_MAIN();
