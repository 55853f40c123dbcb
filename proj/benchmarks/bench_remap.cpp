#include <benchmark/benchmark.h>

#include <random>

#include "crunchsim/remap.hpp"

using namespace crunchsim;

static void BM_RegionFold(benchmark::State& state) {
  std::mt19937_64 rng(1);
  uint64_t key = rng();
  for (auto _ : state) {
    benchmark::DoNotOptimize(region_fold(key));
    key = key * 6364136223846793005ull + 1442695040888963407ull;
  }
}
BENCHMARK(BM_RegionFold);

static void BM_CrunchLookup(benchmark::State& state) {
  const auto table = rrt_generate(8, 32, kDefaultRrtSeed);
  const auto mask = ActiveBankMask::from_pattern("11010101");
  uint64_t key = 0x12345678;
  for (auto _ : state) {
    benchmark::DoNotOptimize(crunch_bank(region_of(key), table, mask));
    key = key * 6364136223846793005ull + 1442695040888963407ull;
  }
}
BENCHMARK(BM_CrunchLookup);

static void BM_MriLookup(benchmark::State& state) {
  const auto mask = ActiveBankMask::from_pattern("11010101");
  uint64_t key = 0x12345678;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mri_bank(key, mask));
    key = key * 6364136223846793005ull + 1442695040888963407ull;
  }
}
BENCHMARK(BM_MriLookup);

static void BM_BfoLookup(benchmark::State& state) {
  const auto mask = ActiveBankMask::from_pattern("11010101");
  uint64_t key = 0x12345678;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bfo_bank(bfo_home_bank(key, 8), mask));
    key = key * 6364136223846793005ull + 1442695040888963407ull;
  }
}
BENCHMARK(BM_BfoLookup);

static void BM_RrtGenerate(benchmark::State& state) {
  uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rrt_generate(8, uint32_t(state.range(0)), seed++));
  }
}
BENCHMARK(BM_RrtGenerate)->Arg(8)->Arg(32);

static void BM_RemapDelta(benchmark::State& state) {
  const auto table = rrt_generate(8, 32, kDefaultRrtSeed);
  const auto before = ActiveBankMask::all_on(8);
  const auto after = ActiveBankMask::from_pattern("11010101");
  for (auto _ : state)
    benchmark::DoNotOptimize(remap_delta(Scheme::kCrunch, before, after, &table));
}
BENCHMARK(BM_RemapDelta);

BENCHMARK_MAIN();
