#include "crunchsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace crunchsim {

uint32_t TimingParams::offchip_penalty_cycles() const {
  const double off = double(offchip_tcas + offchip_trcd + offchip_trp);
  return uint32_t(std::llround(off * cache_clock_ghz / offchip_clock_ghz));
}

void TimingParams::validate() const {
  if (cache_tcas == 0 || cache_trcd == 0 || cache_trp == 0 || offchip_tcas == 0 ||
      offchip_trcd == 0 || offchip_trp == 0)
    throw std::invalid_argument("timing: all latencies must be positive");
  if (cache_clock_ghz <= 0 || offchip_clock_ghz <= 0)
    throw std::invalid_argument("timing: clocks must be positive");
  if (issue_interval_cycles == 0)
    throw std::invalid_argument("timing: issue interval must be positive");
}

void EngineConfig::validate() const {
  geometry.validate();
  timing.validate();
  if (mask.banks() != geometry.banks_per_channel)
    throw std::invalid_argument("engine: mask width does not match geometry");
  if (mask.empty()) throw std::invalid_argument("engine: mask has no active banks");
  if (scheme == Scheme::kCrunch) {
    if (rrt.permutations.empty())
      throw std::invalid_argument("engine: crunch scheme needs a remap table");
    if (rrt.banks != geometry.banks_per_channel)
      throw std::invalid_argument("engine: remap table bank count does not match geometry");
  }
}

namespace {

std::string fmt(double v) {
  char buf[64];
  snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// Shared request path for steady runs and transition experiments.
class SimCore {
 public:
  SimCore(const EngineConfig& config)
      : cfg_(config),
        cache_(config.geometry),
        mapper_{cfg_.scheme, cfg_.scheme == Scheme::kCrunch ? &cfg_.rrt : nullptr},
        mask_(config.mask),
        service_(config.timing.bank_service_cycles()),
        penalty_(config.timing.offchip_penalty_cycles()),
        next_free_(size_t(config.geometry.channels) * config.geometry.banks_per_channel, 0) {
    cache_.apply_power_state(mask_.bits());
    reset_counters();
  }

  void serve(const TraceRecord& rec) {
    const DecodedAddress d = decode(rec.line_address, cfg_.geometry);
    const uint32_t bank = mapper_.map(d.set_key, mask_);
    const uint64_t arrival = issue_cursor_;
    issue_cursor_ += cfg_.timing.issue_interval_cycles;

    uint64_t& free_at = next_free_[size_t(d.channel) * cfg_.geometry.banks_per_channel + bank];
    const uint64_t start = std::max(arrival, free_at);
    uint64_t finish = start + service_;

    const AccessResult res = cache_.access(
        d, bank, rec.op == Op::kWrite ? AccessType::kWrite : AccessType::kRead);
    if (!res.hit) finish += penalty_;

    free_at = finish;
    last_finish_ = std::max(last_finish_, finish);

    ++requests_;
    per_bank_[bank]++;
    latency_sum_ += finish - arrival;
    if (res.hit) {
      ++hits_;
      if (rec.op == Op::kWrite)
        ++write_hits_;
      else
        ++read_hits_;
    } else {
      ++misses_;
    }
    if (res.victim && res.victim->dirty) ++victim_writebacks_;
  }

  // Stall all banks until the transition completes.
  void block_until(uint64_t cycle) {
    for (auto& t : next_free_) t = std::max(t, cycle);
    issue_cursor_ = std::max(issue_cursor_, cycle);
    last_finish_ = std::max(last_finish_, cycle);
  }

  void reset_counters() {
    requests_ = hits_ = misses_ = read_hits_ = write_hits_ = victim_writebacks_ = 0;
    latency_sum_ = 0;
    per_bank_.assign(cfg_.geometry.banks_per_channel, 0);
    window_start_cycle_ = last_finish_;
  }

  SteadyMetrics metrics() const {
    SteadyMetrics m;
    m.requests = requests_;
    m.hits = hits_;
    m.hit_rate = requests_ ? double(hits_) / double(requests_) : 0.0;
    m.per_bank_accesses = per_bank_;
    m.avg_latency_cycles = requests_ ? double(latency_sum_) / double(requests_) : 0.0;
    m.cycles = last_finish_ - window_start_cycle_;
    m.throughput_rpc = m.cycles ? double(requests_) / double(m.cycles) : 0.0;
    m.offchip_reads = misses_;
    m.offchip_writes = victim_writebacks_;

    uint64_t max_acc = 0;
    uint64_t min_acc = std::numeric_limits<uint64_t>::max();
    for (uint32_t b = 0; b < mask_.banks(); ++b) {
      if (!mask_.active(b)) continue;
      max_acc = std::max(max_acc, per_bank_[b]);
      min_acc = std::min(min_acc, per_bank_[b]);
    }
    m.imbalance_ratio = min_acc == 0 ? std::numeric_limits<double>::infinity()
                                     : double(max_acc) / double(min_acc);

    const double seconds =
        m.cycles ? double(m.cycles) / (cfg_.timing.cache_clock_ghz * 1e9) : 0.0;
    ActivityRates cache_rates;
    ActivityRates off_rates;
    if (seconds > 0) {
      // Closed page: one activate per access, one more for each miss fill.
      // The fill write and any victim read share the fill activation.
      cache_rates.activates_per_sec = double(requests_ + misses_) / seconds;
      cache_rates.reads_per_sec = double(read_hits_ + victim_writebacks_) / seconds;
      cache_rates.writes_per_sec = double(write_hits_ + misses_) / seconds;
      off_rates.activates_per_sec = double(misses_ + victim_writebacks_) / seconds;
      off_rates.reads_per_sec = double(misses_) / seconds;
      off_rates.writes_per_sec = double(victim_writebacks_) / seconds;
    }
    m.power = cache_power(cfg_.power, mask_.active_count() * cfg_.geometry.channels,
                          cache_rates);
    m.offchip_activity = off_rates;
    return m;
  }

  DramCache& cache() { return cache_; }
  const BankMapper& mapper() const { return mapper_; }
  const ActiveBankMask& mask() const { return mask_; }
  void set_mask(const ActiveBankMask& mask) { mask_ = mask; }
  uint64_t last_finish() const { return last_finish_; }
  uint64_t requests_seen() const { return requests_; }

 private:
  EngineConfig cfg_;
  DramCache cache_;
  BankMapper mapper_;
  ActiveBankMask mask_;
  uint32_t service_;
  uint32_t penalty_;
  std::vector<uint64_t> next_free_;
  uint64_t issue_cursor_ = 0;
  uint64_t last_finish_ = 0;
  uint64_t window_start_cycle_ = 0;

  uint64_t requests_ = 0, hits_ = 0, misses_ = 0;
  uint64_t read_hits_ = 0, write_hits_ = 0, victim_writebacks_ = 0;
  uint64_t latency_sum_ = 0;
  std::vector<uint64_t> per_bank_;
};

}  // namespace

std::string SteadyMetrics::csv_header(uint32_t banks) {
  std::ostringstream out;
  out << "scheme,pattern,requests,hits,hit_rate,avg_latency_cycles,throughput_rpc,"
         "imbalance_ratio,offchip_reads,offchip_writes,"
      << PowerBreakdown::csv_header() << ",bank_accesses";
  (void)banks;
  return out.str();
}

std::string SteadyMetrics::csv_row(std::string_view scheme, std::string_view pattern) const {
  std::ostringstream out;
  out << scheme << ',' << pattern << ',' << requests << ',' << hits << ',' << fmt(hit_rate)
      << ',' << fmt(avg_latency_cycles) << ',' << fmt(throughput_rpc) << ','
      << fmt(imbalance_ratio) << ',' << offchip_reads << ',' << offchip_writes << ','
      << power.csv_row() << ',';
  for (size_t i = 0; i < per_bank_accesses.size(); ++i)
    out << (i ? "|" : "") << per_bank_accesses[i];
  return out.str();
}

SteadyMetrics run_steady(std::span<const TraceRecord> trace, const EngineConfig& config,
                         std::optional<uint64_t> warmup_requests) {
  config.validate();
  const uint64_t warmup = warmup_requests.value_or(
      uint64_t(double(trace.size()) * config.warmup_fraction));
  if (trace.size() <= warmup)
    throw std::invalid_argument("engine: trace empty after warmup prefix");

  SimCore sim(config);
  for (uint64_t i = 0; i < warmup; ++i) sim.serve(trace[i]);
  sim.reset_counters();
  for (uint64_t i = warmup; i < trace.size(); ++i) sim.serve(trace[i]);
  return sim.metrics();
}

TransitionExperiment run_transition_experiment(std::span<const TraceRecord> trace,
                                               const EngineConfig& config,
                                               const ActiveBankMask& mask_after,
                                               const TransitionPolicy& policy,
                                               uint64_t warmup_requests,
                                               uint64_t sample_window_requests) {
  config.validate();
  if (warmup_requests == 0 || warmup_requests >= trace.size())
    throw std::invalid_argument("engine: warmup must split the trace into two phases");
  if (sample_window_requests == 0)
    throw std::invalid_argument("engine: sample window must be positive");

  TransitionExperiment exp;
  SimCore sim(config);

  std::vector<SampleWindow> series;
  uint64_t window_begin_cycle = 0;
  uint64_t window_requests = 0;
  uint64_t window_index = 0;
  auto window_tick = [&]() {
    if (++window_requests < sample_window_requests) return;
    SampleWindow w;
    w.index = window_index++;
    w.end_cycle = sim.last_finish();
    w.requests = window_requests;
    const uint64_t span = w.end_cycle > window_begin_cycle ? w.end_cycle - window_begin_cycle : 1;
    w.requests_per_cycle = double(window_requests) / double(span);
    series.push_back(w);
    window_begin_cycle = w.end_cycle;
    window_requests = 0;
  };

  for (uint64_t i = 0; i < warmup_requests; ++i) {
    sim.serve(trace[i]);
    window_tick();
  }
  exp.before = sim.metrics();

  // Demand traffic blocks while the transition runs.
  exp.transition_start_cycle = sim.last_finish();
  const bool down = mask_after.is_subset_of(config.mask);
  if (down)
    exp.transition = power_down(sim.cache(), sim.mapper(), config.mask, mask_after, policy);
  else
    exp.transition = power_up(sim.cache(), sim.mapper(), config.mask, mask_after, policy);
  sim.block_until(exp.transition_start_cycle + exp.transition.latency_cycles);
  sim.set_mask(mask_after);

  sim.reset_counters();
  for (uint64_t i = warmup_requests; i < trace.size(); ++i) {
    sim.serve(trace[i]);
    window_tick();
  }
  exp.after = sim.metrics();
  exp.series = std::move(series);
  return exp;
}

std::vector<PatternSweepCell> pattern_sweep(std::span<const TraceRecord> trace,
                                            const EngineConfig& base,
                                            const std::vector<Scheme>& schemes,
                                            const std::vector<std::string>& patterns,
                                            uint32_t jobs) {
  std::vector<PatternSweepCell> cells(schemes.size() * patterns.size());
  for (size_t s = 0; s < schemes.size(); ++s)
    for (size_t p = 0; p < patterns.size(); ++p) {
      cells[s * patterns.size() + p].scheme = schemes[s];
      cells[s * patterns.size() + p].pattern = patterns[p];
    }

  auto run_cell = [&](PatternSweepCell& cell) {
    EngineConfig cfg = base;
    cfg.scheme = cell.scheme;
    cfg.mask = ActiveBankMask::from_pattern(cell.pattern);
    cell.metrics = run_steady(trace, cfg);
  };

  jobs = std::max(1u, jobs);
  if (jobs == 1 || cells.size() <= 1) {
    for (auto& cell : cells) run_cell(cell);
    return cells;
  }
  std::vector<std::thread> workers;
  std::atomic<size_t> next{0};
  for (uint32_t j = 0; j < std::min<size_t>(jobs, cells.size()); ++j)
    workers.emplace_back([&]() {
      for (size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1))
        run_cell(cells[i]);
    });
  for (auto& w : workers) w.join();
  return cells;
}

std::string pattern_sweep_csv(const std::vector<PatternSweepCell>& cells, uint32_t banks) {
  std::ostringstream out;
  out << SteadyMetrics::csv_header(banks) << '\n';
  for (const auto& cell : cells)
    out << cell.metrics.csv_row(to_string(cell.scheme), cell.pattern) << '\n';
  return out.str();
}

std::vector<std::string> balanced_shutdown_patterns() {
  return {"11110111", "11010111", "11010101", "10010101", "10010001", "10000001", "10000000"};
}

std::vector<std::string> sequential_shutdown_patterns() {
  std::vector<std::string> out;
  for (uint32_t down = 1; down <= 7; ++down) {
    std::string p(8, '1');
    for (uint32_t b = 0; b < down; ++b) p[b] = '0';
    out.push_back(p);
  }
  return out;
}

}  // namespace crunchsim
