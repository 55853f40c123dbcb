#include <benchmark/benchmark.h>

#include "crunchsim/engine.hpp"

using namespace crunchsim;

namespace {

EngineConfig bench_config(Scheme scheme) {
  EngineConfig cfg;
  cfg.scheme = scheme;
  cfg.mask = ActiveBankMask::from_pattern("11010111");
  cfg.rrt = rrt_generate(8, 32, kDefaultRrtSeed);
  return cfg;
}

std::vector<TraceRecord> bench_trace() {
  SyntheticSpec spec;
  spec.footprint_bytes = 32ull << 20;
  spec.length = 200000;
  spec.write_fraction = 0.3;
  return generate(spec);
}

}  // namespace

static void BM_SteadyRun(benchmark::State& state) {
  const auto trace = bench_trace();
  const auto cfg = bench_config(Scheme(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_steady(trace, cfg));
  state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(trace.size()));
}
BENCHMARK(BM_SteadyRun)->Arg(0)->Arg(1)->Arg(2);  // bfo, mri, crunch

static void BM_PowerDown(benchmark::State& state) {
  const CacheGeometry g;
  const auto rrt = rrt_generate(8, 32, kDefaultRrtSeed);
  const BankMapper mapper{Scheme::kCrunch, &rrt};
  const auto full = ActiveBankMask::all_on(8);
  const auto after = ActiveBankMask::from_pattern("11110111");
  TransitionPolicy policy;
  policy.discovery = Discovery(state.range(0));
  for (auto _ : state) {
    state.PauseTiming();
    DramCache cache(g);
    const uint64_t keys = uint64_t(g.banks_per_channel) * g.rows_per_bank * g.data_ways;
    for (uint64_t key = 0; key < keys; key += 97) {  // sparse dirty fill
      const DecodedAddress d = decode_line(key << g.channel_bits(), g);
      cache.access(d, mapper.map(d.set_key, full), AccessType::kWrite);
    }
    state.ResumeTiming();
    benchmark::DoNotOptimize(power_down(cache, mapper, full, after, policy));
  }
}
BENCHMARK(BM_PowerDown)->Arg(0)->Arg(1);  // full walk, hier

BENCHMARK_MAIN();
