#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crunchsim/cache.hpp"
#include "crunchsim/power.hpp"
#include "crunchsim/remap.hpp"
#include "crunchsim/transition.hpp"
#include "crunchsim/workload.hpp"

namespace crunchsim {

/// Closed-page timing: every access pays tRCD+tCAS+tRP at its bank; a miss
/// additionally pays the off-chip round trip (off-chip cycles scaled into
/// cache-clock cycles).
struct TimingParams {
  uint32_t cache_tcas = 8;
  uint32_t cache_trcd = 8;
  uint32_t cache_trp = 15;
  uint32_t offchip_tcas = 11;
  uint32_t offchip_trcd = 11;
  uint32_t offchip_trp = 11;
  double cache_clock_ghz = 1.0;
  double offchip_clock_ghz = 0.8;
  uint32_t issue_interval_cycles = 2;  // request arrival spacing

  uint32_t bank_service_cycles() const { return cache_trcd + cache_tcas + cache_trp; }
  uint32_t offchip_penalty_cycles() const;
  void validate() const;
};

struct SteadyMetrics {
  uint64_t requests = 0;
  uint64_t hits = 0;
  double hit_rate = 0;
  std::vector<uint64_t> per_bank_accesses;  // within-channel bank, all channels summed
  double imbalance_ratio = 0;               // max/min over active banks
  double avg_latency_cycles = 0;
  double throughput_rpc = 0;  // requests per cycle
  uint64_t cycles = 0;
  uint64_t offchip_reads = 0;   // demand misses
  uint64_t offchip_writes = 0;  // dirty-victim writebacks
  PowerBreakdown power;         // cache side, from measured activity
  ActivityRates offchip_activity;

  static std::string csv_header(uint32_t banks);
  std::string csv_row(std::string_view scheme, std::string_view pattern) const;
};

struct EngineConfig {
  CacheGeometry geometry{};
  TimingParams timing{};
  DramPowerParams power{};
  Scheme scheme = Scheme::kCrunch;
  ActiveBankMask mask = ActiveBankMask::all_on(8);
  RegionRemapTable rrt;            // consulted when scheme == kCrunch
  double warmup_fraction = 0.15;   // used when no explicit warmup count is given

  void validate() const;
};

/// Trace-driven steady-state run: map, queue at the bank FIFO, serve after
/// queue wait plus fixed service time; misses add the off-chip penalty.
/// Metrics exclude the warmup prefix. Throws if nothing remains after warmup.
SteadyMetrics run_steady(std::span<const TraceRecord> trace, const EngineConfig& config,
                         std::optional<uint64_t> warmup_requests = std::nullopt);

struct SampleWindow {
  uint64_t index = 0;
  uint64_t end_cycle = 0;
  uint64_t requests = 0;
  double requests_per_cycle = 0;
};

struct TransitionExperiment {
  SteadyMetrics before;
  SteadyMetrics after;
  TransitionReport transition;
  uint64_t transition_start_cycle = 0;
  std::vector<SampleWindow> series;  // serviced-request rate over time
};

/// Warm up under config.mask, transition to mask_after (direction inferred
/// from the masks), then resume on the rest of the trace. Demand requests are
/// blocked while the transition runs; the sample series shows the stall.
TransitionExperiment run_transition_experiment(std::span<const TraceRecord> trace,
                                               const EngineConfig& config,
                                               const ActiveBankMask& mask_after,
                                               const TransitionPolicy& policy,
                                               uint64_t warmup_requests,
                                               uint64_t sample_window_requests = 10000);

struct PatternSweepCell {
  Scheme scheme = Scheme::kCrunch;
  std::string pattern;
  SteadyMetrics metrics;
};

/// Cartesian steady runs, each on a cold cache. `jobs` > 1 distributes cells
/// across threads; the result order is always (scheme-major, pattern-minor).
std::vector<PatternSweepCell> pattern_sweep(std::span<const TraceRecord> trace,
                                            const EngineConfig& base,
                                            const std::vector<Scheme>& schemes,
                                            const std::vector<std::string>& patterns,
                                            uint32_t jobs = 1);

std::string pattern_sweep_csv(const std::vector<PatternSweepCell>& cells, uint32_t banks);

/// The balanced shut-down patterns used by the experiments (1..7 banks off).
std::vector<std::string> balanced_shutdown_patterns();
/// Lowest-index-first shut-down: 01111111, 00111111, ...
std::vector<std::string> sequential_shutdown_patterns();

}  // namespace crunchsim
