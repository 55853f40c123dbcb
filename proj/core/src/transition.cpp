#include "crunchsim/transition.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace crunchsim {

Discovery discovery_from_string(std::string_view name) {
  if (name == "full") return Discovery::kFullWalk;
  if (name == "hier") return Discovery::kHier;
  throw std::invalid_argument("unknown discovery '" + std::string(name) +
                              "' (expected full|hier)");
}

DirtyHandling handling_from_string(std::string_view name) {
  if (name == "migrate") return DirtyHandling::kMigrate;
  if (name == "writeback") return DirtyHandling::kWriteback;
  throw std::invalid_argument("unknown dirty handling '" + std::string(name) +
                              "' (expected migrate|writeback)");
}

std::string_view to_string(Discovery d) {
  return d == Discovery::kFullWalk ? "full" : "hier";
}

std::string_view to_string(DirtyHandling h) {
  return h == DirtyHandling::kMigrate ? "migrate" : "writeback";
}

std::string TransitionReport::csv_header() {
  return "latency_cycles,rows_walked,nodes_visited,lines_migrated,"
         "lines_written_back,clean_lines_dropped,energy_nj";
}

std::string TransitionReport::csv_row() const {
  std::ostringstream out;
  out << latency_cycles << ',' << rows_walked << ',' << nodes_visited << ','
      << lines_migrated << ',' << lines_written_back << ',' << clean_lines_dropped << ',';
  char buf[32];
  snprintf(buf, sizeof(buf), "%.3f", energy_nj);
  out << buf;
  return out.str();
}

std::string TransitionReport::to_text() const {
  std::ostringstream out;
  out << "latency_cycles: " << latency_cycles << '\n'
      << "rows_walked: " << rows_walked << '\n'
      << "nodes_visited: " << nodes_visited << '\n'
      << "lines_migrated: " << lines_migrated << '\n'
      << "lines_written_back: " << lines_written_back << '\n'
      << "clean_lines_dropped: " << clean_lines_dropped << '\n';
  char buf[32];
  snprintf(buf, sizeof(buf), "%.3f", energy_nj);
  out << "energy_nj: " << buf << '\n';
  return out.str();
}

double transition_energy(const TransitionReport& report, const TransitionEnergyModel& model) {
  return double(report.rows_walked) * model.row_read_nj +
         double(report.lines_migrated) * model.migrate_nj +
         double(report.lines_written_back) * model.writeback_nj;
}

namespace {

struct Mover {
  uint32_t channel;
  uint32_t bank;  // where the line currently sits
  uint64_t tag;
};

void check_masks(const DramCache& cache, const ActiveBankMask& before,
                 const ActiveBankMask& after) {
  const uint32_t banks = cache.geometry().banks_per_channel;
  if (before.banks() != banks || after.banks() != banks)
    throw std::invalid_argument("transition: mask width does not match geometry");
  for (uint32_t b = 0; b < banks; ++b)
    if (cache.bank_powered(b) != before.active(b))
      throw std::logic_error("transition: cache power state does not match mask_before");
}

// Walk the banks in `scope` and collect every dirty line whose bank changes
// under `after`. Full walk reads all rows; hier reads only rows flagged dirty
// and pays one counter read per tree node visited.
std::vector<Mover> discover(const DramCache& cache, const std::vector<uint32_t>& scope,
                            Discovery mode, const ActiveBankMask& after,
                            const BankMapper& mapper, TransitionReport& report) {
  const CacheGeometry& geom = cache.geometry();
  std::vector<Mover> movers;
  for (uint32_t ch = 0; ch < geom.channels; ++ch) {
    for (uint32_t bank : scope) {
      std::vector<uint32_t> rows_to_read;
      if (mode == Discovery::kFullWalk) {
        report.rows_walked += geom.rows_per_bank;
        rows_to_read.resize(geom.rows_per_bank);
        for (uint32_t r = 0; r < geom.rows_per_bank; ++r) rows_to_read[r] = r;
      } else {
        auto en = cache.dirty_tree(ch, bank).enumerate();
        report.nodes_visited += en.nodes_visited;
        report.rows_walked += en.rows.size();
        rows_to_read = std::move(en.rows);
      }
      for (uint32_t ri : rows_to_read)
        for (const CacheLine& line : cache.row(ch, bank, ri)) {
          if (!line.dirty) continue;
          const DecodedAddress d = decode_line(line.tag, geom);
          if (after.empty() || mapper.map(d.set_key, after) != bank)
            movers.push_back({ch, bank, line.tag});
        }
    }
  }
  return movers;
}

// Invalidate every remapped clean line in `scope`. Clean drops are plain
// invalidations, so they carry no read cost.
uint64_t drop_remapped_clean(DramCache& cache, const std::vector<uint32_t>& scope,
                             const ActiveBankMask& after, const BankMapper& mapper) {
  const CacheGeometry& geom = cache.geometry();
  uint64_t dropped = 0;
  for (uint32_t ch = 0; ch < geom.channels; ++ch)
    for (uint32_t bank : scope)
      for (uint32_t ri = 0; ri < geom.rows_per_bank; ++ri) {
        std::vector<uint64_t> victims;
        for (const CacheLine& line : cache.row(ch, bank, ri)) {
          if (line.dirty) continue;
          const DecodedAddress d = decode_line(line.tag, geom);
          if (after.empty() || mapper.map(d.set_key, after) != bank)
            victims.push_back(line.tag);
        }
        for (uint64_t tag : victims) {
          cache.extract_line(ch, bank, ri, tag);
          ++dropped;
        }
      }
  return dropped;
}

// Pull the movers out first, then place or write back. Extraction-first means
// capacity evictions at the destinations can never hit a line that is itself
// waiting to move.
void apply_moves(DramCache& cache, const std::vector<Mover>& movers,
                 const ActiveBankMask& after, const BankMapper& mapper,
                 const TransitionPolicy& policy, TransitionReport& report,
                 const WritebackSink& sink) {
  const CacheGeometry& geom = cache.geometry();
  for (const Mover& m : movers) {
    const DecodedAddress d = decode_line(m.tag, geom);
    if (!cache.extract_line(m.channel, m.bank, d.row_index, m.tag))
      throw std::logic_error("transition: discovered line vanished before the move");
  }
  for (const Mover& m : movers) {
    const DecodedAddress d = decode_line(m.tag, geom);
    if (policy.handling == DirtyHandling::kMigrate && !after.empty()) {
      const uint32_t nb = mapper.map(d.set_key, after);
      auto victim = cache.insert_line(m.channel, nb, d.row_index, m.tag, true);
      ++report.lines_migrated;
      if (victim && victim->dirty) {
        ++report.lines_written_back;
        if (sink) sink(victim->tag);
      }
    } else {
      ++report.lines_written_back;
      if (sink) sink(m.tag);
    }
  }
}

void account_latency(TransitionReport& report, const TransitionPolicy& policy) {
  const uint64_t walk = report.rows_walked * policy.costs.row_walk_cycles;
  const uint64_t transfer = report.lines_migrated * policy.costs.line_migrate_cycles +
                            report.lines_written_back * policy.costs.line_writeback_cycles;
  report.latency_cycles =
      walk + transfer -
      uint64_t(policy.costs.overlap_fraction * double(std::min(walk, transfer)));
  report.energy_nj = transition_energy(report, policy.energy);
}

}  // namespace

TransitionReport power_down(DramCache& cache, const BankMapper& mapper,
                            const ActiveBankMask& before, const ActiveBankMask& after,
                            const TransitionPolicy& policy, const WritebackSink& sink) {
  check_masks(cache, before, after);
  if (!after.is_subset_of(before) || after == before)
    throw std::invalid_argument("power_down: mask_after must be a proper subset of mask_before");
  if (after.empty() && !policy.allow_full_shutdown)
    throw std::invalid_argument("power_down: all-off mask requires the full-shutdown gate");

  std::vector<uint32_t> newly_down;
  for (uint32_t b = 0; b < before.banks(); ++b)
    if (before.active(b) && !after.active(b)) newly_down.push_back(b);

  // MRI reshuffles the whole mapping, so every active bank must be searched;
  // BFO and CRUNCH disturb only the dying banks.
  const std::vector<uint32_t> scope =
      mapper.scheme == Scheme::kMri ? before.active_banks() : newly_down;

  TransitionReport report;
  const std::vector<Mover> movers =
      discover(cache, scope, policy.discovery, after, mapper, report);
  report.clean_lines_dropped += drop_remapped_clean(cache, scope, after, mapper);
  apply_moves(cache, movers, after, mapper, policy, report, sink);

  for (uint32_t b : newly_down) {
    // Anything still resident in a dying bank is clean and unreachable.
    report.clean_lines_dropped += cache.line_count_in_bank(b);
    cache.clear_bank(b);
    cache.set_bank_powered(b, false);
  }

  account_latency(report, policy);
  return report;
}

TransitionReport power_up(DramCache& cache, const BankMapper& mapper,
                          const ActiveBankMask& before, const ActiveBankMask& after,
                          const TransitionPolicy& policy, const WritebackSink& sink) {
  check_masks(cache, before, after);
  if (!before.is_subset_of(after) || after == before)
    throw std::invalid_argument("power_up: mask_before must be a proper subset of mask_after");
  if (before.empty())
    throw std::invalid_argument("power_up: no active banks to repatriate from");

  std::vector<uint32_t> newly_up;
  for (uint32_t b = 0; b < after.banks(); ++b)
    if (!before.active(b) && after.active(b)) newly_up.push_back(b);
  for (uint32_t b : newly_up) cache.set_bank_powered(b, true);

  std::vector<uint32_t> scope;
  if (mapper.scheme == Scheme::kBfo) {
    // A returning bank's displaced lines live in exactly its fail-over bank
    // under the old mask.
    std::set<uint32_t> s;
    for (uint32_t b : newly_up) s.insert(bfo_bank(b, before));
    scope.assign(s.begin(), s.end());
  } else {
    scope = before.active_banks();
  }

  TransitionReport report;
  const std::vector<Mover> movers =
      discover(cache, scope, policy.discovery, after, mapper, report);
  report.clean_lines_dropped += drop_remapped_clean(cache, scope, after, mapper);
  apply_moves(cache, movers, after, mapper, policy, report, sink);

  account_latency(report, policy);
  return report;
}

}  // namespace crunchsim
