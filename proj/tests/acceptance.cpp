// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Each criterion also enforces its runtime budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "crunchsim/analytic.hpp"
#include "crunchsim/bup.hpp"
#include "crunchsim/engine.hpp"

using namespace crunchsim;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

struct Criterion {
  std::string name;
  double budget_seconds;
  std::vector<std::string> problems;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  Criterion(std::string n, double budget) : name(std::move(n)), budget_seconds(budget) {}

  void require(bool ok, const std::string& detail) {
    if (!ok) problems.push_back(detail);
  }
  void finish() {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed >= budget_seconds)
      problems.push_back("runtime " + std::to_string(elapsed) + "s exceeds budget " +
                         std::to_string(budget_seconds) + "s");
    if (problems.empty()) {
      printf("PASS  %s (%.2fs)\n", name.c_str(), elapsed);
    } else {
      printf("FAIL  %s (%.2fs)\n", name.c_str(), elapsed);
      for (const auto& p : problems) printf("      - %s\n", p.c_str());
      ++g_failures;
    }
    fflush(stdout);
  }
};

std::string fmt(double v) {
  char buf[64];
  snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

const RegionRemapTable& default_rrt() {
  static const RegionRemapTable t = rrt_generate(8, 32, kDefaultRrtSeed);
  return t;
}

BankMapper mapper_for(Scheme scheme) {
  return BankMapper{scheme, scheme == Scheme::kCrunch ? &default_rrt() : nullptr};
}

EngineConfig engine_config(Scheme scheme, const std::string& pattern) {
  EngineConfig cfg;
  cfg.scheme = scheme;
  cfg.mask = ActiveBankMask::from_pattern(pattern);
  cfg.rrt = default_rrt();
  return cfg;
}

void fill_cache(DramCache& cache, const BankMapper& mapper, const ActiveBankMask& mask,
                AccessType op) {
  const CacheGeometry& g = cache.geometry();
  const uint64_t keys = uint64_t(g.banks_per_channel) * g.rows_per_bank * g.data_ways;
  for (uint64_t key = 0; key < keys; ++key)
    for (uint32_t ch = 0; ch < g.channels; ++ch) {
      const DecodedAddress d = decode_line((key << g.channel_bits()) | ch, g);
      cache.access(d, mapper.map(d.set_key, mask), op);
    }
}

void criterion_rrt_structure() {
  Criterion c("1. rrt-structure", 5.0);
  const auto table = rrt_generate(8, 32, kDefaultRrtSeed);
  c.require(table.permutations.size() == 32, "expected 32 permutations");
  c.require(table.entry_bits() == 24, "entries must be 24 bits (8 ids x 3 bits)");
  c.require(table.table_bytes() == 96, "table must be exactly 96 bytes");
  const auto problems = table.validate();
  for (const auto& p : problems) c.require(false, "structural violation: " + p);
  // cyclic-successor balance, checked independently of validate()
  uint32_t succ[8][8] = {};
  for (const auto& row : table.permutations)
    for (uint32_t i = 0; i < 8; ++i) succ[row[i]][row[(i + 1) % 8]]++;
  for (uint32_t b = 0; b < 8; ++b)
    for (uint32_t s = 0; s < 8; ++s)
      if (b != s)
        c.require(succ[b][s] == 4 || succ[b][s] == 5,
                  "successor count succ[" + std::to_string(b) + "][" + std::to_string(s) +
                      "] = " + std::to_string(succ[b][s]) + ", want 4 or 5");
  c.finish();
}

void criterion_hier_sizing() {
  Criterion c("2. hier-sizing", 5.0);
  const uint64_t bits = DirtyRowTree::storage_bits(2048, 16);
  c.require(bits == 2772, "storage_bits(2048,16) = " + std::to_string(bits) + ", want 2772");
  const uint64_t total = bits * 32;
  c.require(total == 88704, "32-bank total = " + std::to_string(total) + " bits");
  const double kb = double(total) / 8.0 / 1024.0;
  c.require(std::abs(kb - 10.8) < 0.05, "32-bank total = " + fmt(kb) + " KB, want ~10.8");
  c.finish();
}

void criterion_hier_correctness() {
  Criterion c("3. hier-correctness", 10.0);
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    DirtyRowTree tree(2048, 16);
    std::set<uint32_t> dirty;
    // half the trials stay sparse to exercise the pruning bound
    const uint32_t target = trial % 2 == 0 ? uint32_t(rng() % 21) : uint32_t(rng() % 2048);
    while (dirty.size() < target) {
      const uint32_t row = uint32_t(rng() % 2048);
      if (dirty.insert(row).second) tree.set(row, true);
    }
    const auto en = tree.enumerate();
    if (en.rows != std::vector<uint32_t>(dirty.begin(), dirty.end())) {
      c.require(false, "enumeration mismatch at trial " + std::to_string(trial));
      break;
    }
    if (dirty.size() <= 20 && en.nodes_visited > 20 * 3 * 16 + 16) {
      c.require(false, "visited " + std::to_string(en.nodes_visited) + " nodes for " +
                           std::to_string(dirty.size()) + " dirty rows");
      break;
    }
  }
  c.finish();
}

void criterion_minimal_remapping() {
  Criterion c("4. minimal-remapping", 30.0);
  const auto& table = default_rrt();
  const auto full = ActiveBankMask::all_on(8);
  const auto check_mask = [&](const ActiveBankMask& after, bool record) {
    const auto delta = remap_delta(Scheme::kCrunch, full, after, &table);
    std::set<uint32_t> moved(delta.moved_regions.begin(), delta.moved_regions.end());
    for (uint32_t s = 0; s < 32; ++s)
      for (uint32_t p = 0; p < 8; ++p) {
        const uint32_t region = s * 8 + p;
        const bool primary_down = !after.active(crunch_bank({s, p}, table, full));
        if (primary_down != (moved.count(region) > 0) && record)
          c.require(false, "mask " + after.to_pattern() + " region " +
                               std::to_string(region) + " delta mismatch");
      }
  };
  for (const auto& pattern : balanced_shutdown_patterns())
    check_mask(ActiveBankMask::from_pattern(pattern), true);
  for (uint32_t bits = 1; bits < 255; ++bits) check_mask(ActiveBankMask(8, bits), true);
  c.finish();
}

void criterion_load_balance() {
  Criterion c("5. load-balance", 5.0);
  const auto& table = default_rrt();
  const auto full = ActiveBankMask::all_on(8);
  uint32_t counts[8] = {};
  for (uint32_t s = 0; s < 32; ++s)
    for (uint32_t p = 0; p < 8; ++p) counts[crunch_bank({s, p}, table, full)]++;
  for (uint32_t b = 0; b < 8; ++b)
    c.require(counts[b] == 32, "all-on: bank " + std::to_string(b) + " owns " +
                                   std::to_string(counts[b]) + " regions, want 32");
  for (uint32_t down = 0; down < 8; ++down) {
    auto mask = ActiveBankMask::all_on(8);
    mask.set(down, false);
    uint32_t one_down[8] = {};
    for (uint32_t s = 0; s < 32; ++s)
      for (uint32_t p = 0; p < 8; ++p) one_down[crunch_bank({s, p}, table, mask)]++;
    for (uint32_t b = 0; b < 8; ++b) {
      if (b == down) continue;
      c.require(one_down[b] == 36 || one_down[b] == 37,
                "bank " + std::to_string(down) + " down: survivor " + std::to_string(b) +
                    " owns " + std::to_string(one_down[b]) + ", want 36 or 37");
    }
  }
  c.finish();
}

void criterion_imbalance() {
  Criterion c("6. uniform-traffic-imbalance", 60.0);
  SyntheticSpec spec;
  spec.footprint_bytes = 64ull << 20;
  spec.length = 1000000;
  spec.seed = 11;
  const auto trace = generate(spec);

  const auto bfo = run_steady(trace, engine_config(Scheme::kBfo, "11010111"));
  c.require(std::abs(bfo.imbalance_ratio - 2.0) <= 0.05,
            "bfo 11010111 imbalance " + fmt(bfo.imbalance_ratio) + ", want 2.00 +- 0.05");
  const auto crunch = run_steady(trace, engine_config(Scheme::kCrunch, "11010111"));
  c.require(crunch.imbalance_ratio <= 1.10,
            "crunch 11010111 imbalance " + fmt(crunch.imbalance_ratio) + ", want <= 1.10");
  const auto mri = run_steady(trace, engine_config(Scheme::kMri, "11010111"));
  c.require(mri.imbalance_ratio <= 1.05,
            "mri 11010111 imbalance " + fmt(mri.imbalance_ratio) + ", want <= 1.05");

  const auto bfo_seq = run_steady(trace, engine_config(Scheme::kBfo, "00011111"));
  c.require(std::abs(bfo_seq.imbalance_ratio - 4.0) <= 0.10,
            "bfo 00011111 imbalance " + fmt(bfo_seq.imbalance_ratio) + ", want 4.00 +- 0.10");
  const auto crunch_seq = run_steady(trace, engine_config(Scheme::kCrunch, "00011111"));
  const auto crunch_bal = run_steady(trace, engine_config(Scheme::kCrunch, "11010101"));
  const double rel =
      std::abs(crunch_seq.imbalance_ratio - crunch_bal.imbalance_ratio) /
      crunch_bal.imbalance_ratio;
  c.require(rel <= 0.05, "crunch sequential " + fmt(crunch_seq.imbalance_ratio) +
                             " vs balanced " + fmt(crunch_bal.imbalance_ratio) +
                             " differ by " + fmt(rel * 100) + "%");
  c.finish();
}

void criterion_conservation() {
  Criterion c("7. dirty-data-conservation", 120.0);
  std::mt19937_64 rng(31337);
  CacheGeometry g;
  g.channels = 1;
  g.banks_per_channel = 8;
  g.rows_per_bank = 16;
  g.row_bytes = 512;
  g.line_bytes = 64;
  g.data_ways = 4;
  const uint64_t keys = uint64_t(g.banks_per_channel) * g.rows_per_bank * g.data_ways;

  for (int trial = 0; trial < 1000 && c.problems.empty(); ++trial) {
    const Scheme scheme = Scheme(trial % 3);
    const auto mapper = mapper_for(scheme);
    TransitionPolicy policy;
    policy.handling = (trial / 3) % 2 ? DirtyHandling::kMigrate : DirtyHandling::kWriteback;
    policy.discovery = (trial / 6) % 2 ? Discovery::kHier : Discovery::kFullWalk;

    DramCache cache(g);
    ActiveBankMask mask = ActiveBankMask::all_on(8);
    std::set<uint64_t> pending;  // written, not yet flushed to memory
    bool phantom = false;
    const auto sink = [&](uint64_t tag) {
      if (pending.erase(tag) != 1) phantom = true;
    };
    for (int step = 0; step < 300; ++step) {
      if (rng() % 12 == 0) {
        const ActiveBankMask next(8, 1 + uint32_t(rng() % 254));
        if (next == mask) continue;
        if (next.is_subset_of(mask))
          power_down(cache, mapper, mask, next, policy, sink);
        else if (mask.is_subset_of(next))
          power_up(cache, mapper, mask, next, policy, sink);
        else
          continue;
        mask = next;
        continue;
      }
      const DecodedAddress d = decode_line(rng() % keys, g);
      const bool write = rng() & 1;
      const auto res = cache.access(d, mapper.map(d.set_key, mask),
                                    write ? AccessType::kWrite : AccessType::kRead);
      if (write) pending.insert(d.tag);
      if (res.victim && res.victim->dirty && pending.erase(res.victim->tag) != 1)
        phantom = true;
    }
    const auto dirty = cache.dirty_line_addresses();
    const std::set<uint64_t> in_cache(dirty.begin(), dirty.end());
    if (phantom)
      c.require(false, "phantom writeback at trial " + std::to_string(trial));
    else if (in_cache != pending)
      c.require(false, "trial " + std::to_string(trial) + ": " +
                           std::to_string(pending.size()) + " lines expected dirty, " +
                           std::to_string(in_cache.size()) + " found");
  }
  c.finish();
}

void criterion_migration_scope() {
  Criterion c("8. migration-scope-ordering", 60.0);
  const CacheGeometry g;  // full default geometry
  const auto full = ActiveBankMask::all_on(8);
  const auto seven = ActiveBankMask::from_pattern("11110111");
  TransitionPolicy policy;
  policy.discovery = Discovery::kFullWalk;

  uint64_t crunch_migrated = 0, mri_migrated = 0;
  for (Scheme scheme : {Scheme::kCrunch, Scheme::kBfo, Scheme::kMri}) {
    DramCache cache(g);
    const auto mapper = mapper_for(scheme);
    fill_cache(cache, mapper, full, AccessType::kWrite);
    const uint64_t dirty_before = cache.dirty_line_count();
    const auto report = power_down(cache, mapper, full, seven, policy);
    const double fraction = double(report.lines_migrated) / double(dirty_before);
    const uint64_t bank_rows = uint64_t(g.rows_per_bank) * g.channels;
    if (scheme == Scheme::kMri) {
      mri_migrated = report.lines_migrated;
      c.require(report.rows_walked == 8 * bank_rows,
                "mri walk covered " + std::to_string(report.rows_walked / bank_rows) +
                    " banks, want 8");
    } else {
      if (scheme == Scheme::kCrunch) crunch_migrated = report.lines_migrated;
      c.require(std::abs(fraction - 0.125) <= 0.02,
                std::string(to_string(scheme)) + " migrated " + fmt(fraction * 100) +
                    "% of dirty lines, want 12.5 +- 2");
      c.require(report.rows_walked == bank_rows,
                std::string(to_string(scheme)) + " walked " +
                    std::to_string(report.rows_walked / bank_rows) + " banks, want 1");
    }
  }
  c.require(mri_migrated >= 6 * crunch_migrated,
            "mri migrated " + std::to_string(mri_migrated) + " lines, want >= 6x crunch's " +
                std::to_string(crunch_migrated));

  // MRI walk cost is flat no matter how many banks drop
  std::vector<uint64_t> walks;
  for (const auto& pattern : balanced_shutdown_patterns()) {
    DramCache cache(g);
    const auto mapper = mapper_for(Scheme::kMri);
    fill_cache(cache, mapper, full, AccessType::kWrite);
    walks.push_back(
        power_down(cache, mapper, full, ActiveBankMask::from_pattern(pattern), policy)
            .rows_walked);
  }
  for (uint64_t w : walks)
    c.require(std::abs(double(w) - double(walks.front())) <= 0.05 * double(walks.front()),
              "mri walk cost varies: " + std::to_string(w) + " vs " +
                  std::to_string(walks.front()));
  c.finish();
}

void criterion_bup() {
  Criterion c("9. bup", 5.0);
  BupConfig cfg;
  cfg.sampling_stride = 1;
  {
    UtilityMonitor m(cfg);
    for (int round = 0; round < 50; ++round)
      for (uint64_t tag = 0; tag < 13; ++tag) m.observe(0, tag);
    const auto d = bup_decide(m, m.access_count(), 1000.0);
    c.require(d.recommended_ways == 13,
              "knee at 13 ways, monitor said " + std::to_string(d.recommended_ways));
    c.require(d.recommended_banks == 4,
              "13 ways -> " + std::to_string(d.recommended_banks) + " banks, want 4");
  }
  for (uint32_t knee : {3u, 8u, 17u, 26u, 32u}) {
    UtilityMonitor m(cfg);
    for (int round = 0; round < 40; ++round)
      for (uint64_t tag = 0; tag < knee; ++tag) m.observe(0, tag);
    // instruction proxy scaled to hold MPKI above the shutdown gate
    const double proxy = double(m.miss_count()) * 1000.0 / 50.0;
    const auto d = bup_decide(m, m.access_count(), proxy);
    c.require(!d.cache_off && std::abs(int(d.recommended_ways) - int(knee)) <= 1,
              "knee " + std::to_string(knee) + " recovered as " +
                  std::to_string(d.recommended_ways));
  }
  {
    UtilityMonitor m(cfg);
    for (int i = 0; i < 1000; ++i) m.observe(0, i % 40);  // plenty of misses
    // instruction proxy chosen so MPKI lands at 2
    const double instr = double(m.miss_count()) * 1000.0 / 2.0;
    const auto d = bup_decide(m, m.access_count(), instr);
    c.require(d.epoch_mpki < 5.0 && d.cache_off,
              "MPKI " + fmt(d.epoch_mpki) + " below threshold must shut the cache off");
  }
  c.finish();
}

void criterion_power() {
  Criterion c("10. power-model", 5.0);
  DramPowerParams p;
  const ActivityRates busy{8e6, 4e6, 4e6};
  for (uint32_t banks = 1; banks <= 8; ++banks) {
    const auto b = cache_power(p, banks, busy);
    c.require(b.background_mw == p.background_mw_per_bank * banks &&
                  b.refresh_mw == p.refresh_mw_per_bank * banks,
              "static power not linear at " + std::to_string(banks) + " banks");
  }
  const double static_mw = (p.background_mw_per_bank + p.refresh_mw_per_bank) * 8;
  const double per_request_nj = p.activate_nj + (p.read_nj + p.write_nj) / 2.0;
  const double rate = static_mw / 4.0 / (per_request_nj * 1e-6);
  const ActivityRates ref{rate, rate / 2, rate / 2};
  const auto full = cache_power(p, 8, ref);
  const auto one = cache_power(p, 1, ref);
  const double reduction = 1.0 - one.total_mw / full.total_mw;
  c.require(reduction >= 0.63 && reduction <= 0.79,
            "8->1 bank reduction " + fmt(reduction * 100) + "%, want 63..79");
  const auto idle = cache_power(p, 8, {0, 0, 0});
  c.require(idle.background_mw / idle.total_mw >= 0.80,
            "idle background share " + fmt(idle.background_mw / idle.total_mw * 100) + "%");
  c.finish();
}

void criterion_analytic() {
  Criterion c("11. analytic-model", 60.0);
  ModelInputs probe;
  probe.n_million_instructions = 50;
  probe.ipc_full = 2.0;
  probe.ipc_reduced = 1.5;
  probe.up_latency_cycles = 12345;
  probe.down_latency_cycles = 54321;
  probe.tpmi = 0;
  const double n = probe.n_million_instructions * 1e6;
  c.require(std::abs(execution_time_cycles(probe) -
                     (n / (2 * probe.ipc_full) + n / (2 * probe.ipc_reduced))) < 1e-6,
            "tpmi=0 limit broken");
  probe.ipc_reduced = probe.ipc_full;
  c.require(std::abs(execution_time_cycles(probe) - n / probe.ipc_full) < 1e-6,
            "uniform-IPC limit broken");
  probe.tpmi = 3;
  const double slope = (execution_time_cycles(probe) -
                        [&] {
                          ModelInputs z = probe;
                          z.tpmi = 0;
                          return execution_time_cycles(z);
                        }()) /
                       probe.tpmi;
  c.require(std::abs(slope - probe.n_million_instructions *
                                 (probe.up_latency_cycles + probe.down_latency_cycles)) <
                1e-6,
            "affine slope in tpmi broken");

  // measured transition inputs at b = 4 (pattern 10010101)
  const CacheGeometry g;
  const auto full = ActiveBankMask::all_on(8);
  const auto b4 = ActiveBankMask::from_pattern("10010101");
  TransitionPolicy policy;
  policy.discovery = Discovery::kHier;
  std::vector<SweepInput> inputs;
  for (Scheme scheme : {Scheme::kCrunch, Scheme::kMri}) {
    DramCache cache(g);
    const auto mapper = mapper_for(scheme);
    fill_cache(cache, mapper, full, AccessType::kWrite);
    const auto down = power_down(cache, mapper, full, b4, policy);
    const auto up = power_up(cache, mapper, b4, full, policy);
    SweepInput si;
    si.scheme = to_string(scheme);
    si.inputs.n_million_instructions = 100;
    si.inputs.steady_banks = 4;
    si.inputs.ipc_full = 1.0;
    si.inputs.ipc_reduced = 1.0;
    si.inputs.down_latency_cycles = double(down.latency_cycles);
    si.inputs.up_latency_cycles = double(up.latency_cycles);
    si.inputs.power_full_mw = 120.0;
    si.inputs.power_reduced_mw = 66.0;
    si.inputs.down_energy_nj = down.energy_nj;
    si.inputs.up_energy_nj = up.energy_nj;
    inputs.push_back(std::move(si));
  }
  const auto points = tpmi_sweep(inputs, {1, 10, 100});
  for (size_t i = 0; i < 3; ++i) {
    const auto& crunch = points[i];
    const auto& mri = points[3 + i];
    c.require(crunch.time_cycles <= mri.time_cycles,
              "tpmi " + fmt(crunch.tpmi) + ": crunch time above mri");
    c.require(crunch.energy_nj <= mri.energy_nj,
              "tpmi " + fmt(crunch.tpmi) + ": crunch energy above mri");
  }
  c.finish();
}

void criterion_determinism() {
  Criterion c("12. determinism", 120.0);
#ifndef CRUNCHSIM_CLI_PATH
  c.require(false, "CLI path not wired into the build");
#else
  const fs::path dir = fs::temp_directory_path() / "crunchsim_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto file = [&](const char* name) { return (dir / name).string(); };
  const auto run = [&](const std::string& args) {
    const std::string cmd = std::string(CRUNCHSIM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
  };
  const auto slurp = [](const std::string& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };

  const std::string steady_args =
      "steady --scheme crunch --pattern 11010111 --synthetic zipf --zipf-alpha 0.8 "
      "--footprint 8388608 --length 200000 --write-frac 0.3";
  c.require(run(steady_args + " --csv " + file("s1.csv") + " --manifest " +
                file("steady.manifest")) == 0,
            "steady run failed");
  c.require(run("--config " + file("steady.manifest") + " steady --csv " + file("s2.csv")) ==
                0,
            "steady re-run from manifest failed");
  c.require(!slurp(file("s1.csv")).empty() &&
                slurp(file("s1.csv")) == slurp(file("s2.csv")),
            "steady outputs differ across manifest re-run");

  const std::string trans_args =
      "transition down --scheme mri --before 11111111 --after 11010111 --synthetic uniform "
      "--footprint 8388608 --length 120000 --write-frac 0.5 --warmup 80000";
  c.require(run(trans_args + " --csv " + file("t1.csv") + " --series " + file("w1.csv") +
                " --manifest " + file("trans.manifest")) == 0,
            "transition run failed");
  c.require(run("--config " + file("trans.manifest") + " transition down --csv " +
                file("t2.csv") + " --series " + file("w2.csv")) == 0,
            "transition re-run from manifest failed");
  c.require(!slurp(file("t1.csv")).empty() &&
                slurp(file("t1.csv")) == slurp(file("t2.csv")),
            "transition outputs differ across manifest re-run");
  c.require(slurp(file("w1.csv")) == slurp(file("w2.csv")),
            "sample series differ across manifest re-run");
  fs::remove_all(dir);
#endif
  c.finish();
}

}  // namespace

int main() {
  criterion_rrt_structure();
  criterion_hier_sizing();
  criterion_hier_correctness();
  criterion_minimal_remapping();
  criterion_load_balance();
  criterion_imbalance();
  criterion_conservation();
  criterion_migration_scope();
  criterion_bup();
  criterion_power();
  criterion_analytic();
  criterion_determinism();
  if (g_failures) {
    printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  printf("all criteria passed\n");
  return 0;
}
