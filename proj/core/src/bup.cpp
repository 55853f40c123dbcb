#include "crunchsim/bup.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace crunchsim {

UtilityMonitor::UtilityMonitor(const BupConfig& config) : config_(config) {
  if (config.sampled_sets == 0 || config.ways == 0 || config.sampling_stride == 0 ||
      config.total_banks == 0)
    throw std::invalid_argument("bup: config values must be >= 1");
  shadow_.resize(config.sampled_sets);
  hits_.assign(config.ways + 1, 0);
}

bool UtilityMonitor::sampled(uint64_t set_key) const {
  return set_key % config_.sampling_stride == 0;
}

void UtilityMonitor::observe(uint64_t set_key, uint64_t tag) {
  if (!sampled(set_key)) return;
  ++accesses_;
  auto& set = shadow_[(set_key / config_.sampling_stride) % config_.sampled_sets];
  for (size_t i = 0; i < set.size(); ++i) {
    if (set[i] != tag) continue;
    ++hits_[i + 1];  // stack position is 1-based
    set.erase(set.begin() + long(i));
    set.insert(set.begin(), tag);
    return;
  }
  ++misses_;
  set.insert(set.begin(), tag);
  if (set.size() > config_.ways) set.pop_back();
}

uint64_t UtilityMonitor::misses_at_ways(uint32_t ways) const {
  ways = std::min(ways, config_.ways);
  uint64_t cum = 0;
  for (uint32_t i = 1; i <= ways; ++i) cum += hits_[i];
  return accesses_ - cum;
}

void UtilityMonitor::reset_epoch() {
  std::fill(hits_.begin(), hits_.end(), 0);
  accesses_ = 0;
  misses_ = 0;
}

std::string BupDecision::csv_header() {
  return "epoch,mpki,recommended_ways,recommended_banks,cache_off";
}

std::string BupDecision::csv_row(uint64_t epoch) const {
  char buf[32];
  snprintf(buf, sizeof(buf), "%.4f", epoch_mpki);
  std::ostringstream out;
  out << epoch << ',' << buf << ',' << recommended_ways << ',' << recommended_banks << ','
      << (cache_off ? 1 : 0);
  return out.str();
}

BupDecision bup_decide(const UtilityMonitor& monitor, uint64_t epoch_requests,
                       double epoch_instruction_proxy, double miss_slack,
                       double mpki_threshold) {
  BupDecision d;
  const BupConfig& cfg = monitor.config();
  if (monitor.access_count() == 0) {
    d.no_change = true;
    return d;
  }
  // Scale the sampled misses back up by the measured sampling ratio.
  const double scale = double(epoch_requests) / double(monitor.access_count());
  const double scaled_misses = double(monitor.miss_count()) * scale;
  d.epoch_mpki = epoch_instruction_proxy > 0
                     ? scaled_misses / (epoch_instruction_proxy / 1000.0)
                     : 0.0;
  if (d.epoch_mpki < mpki_threshold) {
    d.cache_off = true;
    return d;
  }
  const uint64_t full_misses = monitor.misses_at_ways(cfg.ways);
  const double budget = double(full_misses) * (1.0 + miss_slack);
  uint32_t w = cfg.ways;
  for (uint32_t cand = 1; cand <= cfg.ways; ++cand) {
    if (double(monitor.misses_at_ways(cand)) <= budget) {
      w = cand;
      break;
    }
  }
  d.recommended_ways = w;
  d.recommended_banks =
      uint32_t((uint64_t(w) * cfg.total_banks + cfg.ways - 1) / cfg.ways);  // round up
  return d;
}

}  // namespace crunchsim
