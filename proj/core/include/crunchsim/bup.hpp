#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace crunchsim {

struct BupConfig {
  uint32_t sampled_sets = 32;
  uint32_t ways = 32;
  uint64_t sampling_stride = 512;  // observe set_keys with set_key % stride == 0
  uint32_t total_banks = 8;
};

/// Sampled LRU stack-distance monitor. One shared monitor watches the whole
/// cache: sampled set_keys feed a 32-way LRU shadow set each; a hit at stack
/// depth i bumps hit_counters[i]. Reading the counters tells how many misses
/// the cache would take with any smaller number of ways.
class UtilityMonitor {
 public:
  explicit UtilityMonitor(const BupConfig& config = {});

  bool sampled(uint64_t set_key) const;
  void observe(uint64_t set_key, uint64_t tag);

  uint64_t access_count() const { return accesses_; }
  uint64_t miss_count() const { return misses_; }
  /// 1-based stack positions; index 0 unused.
  const std::vector<uint64_t>& hit_counters() const { return hits_; }
  /// Misses the cache would take if only `ways` ways existed.
  uint64_t misses_at_ways(uint32_t ways) const;

  /// Clears the counters but keeps the shadow tags warm across epochs.
  void reset_epoch();

  const BupConfig& config() const { return config_; }

 private:
  BupConfig config_;
  std::vector<std::vector<uint64_t>> shadow_;  // per sampled set, MRU first
  std::vector<uint64_t> hits_;
  uint64_t accesses_ = 0;
  uint64_t misses_ = 0;
};

struct BupDecision {
  uint32_t recommended_ways = 0;
  uint32_t recommended_banks = 0;
  bool cache_off = false;
  bool no_change = false;  // epoch carried no sampled accesses
  double epoch_mpki = 0;

  static std::string csv_header();
  std::string csv_row(uint64_t epoch) const;
};

/// Epoch decision. MPKI below the threshold shuts the whole cache off.
/// Otherwise pick the fewest ways whose miss count stays within miss_slack of
/// the full-way miss count, and interpolate ways to banks:
/// banks = ceil(ways / total_ways * total_banks).
BupDecision bup_decide(const UtilityMonitor& monitor, uint64_t epoch_requests,
                       double epoch_instruction_proxy, double miss_slack = 0.05,
                       double mpki_threshold = 5.0);

}  // namespace crunchsim
