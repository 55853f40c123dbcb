#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "crunchsim/cache.hpp"
#include "crunchsim/remap.hpp"

namespace crunchsim {

enum class Discovery { kFullWalk, kHier };
enum class DirtyHandling { kMigrate, kWriteback };

Discovery discovery_from_string(std::string_view name);
DirtyHandling handling_from_string(std::string_view name);
std::string_view to_string(Discovery d);
std::string_view to_string(DirtyHandling h);

/// Per-event cycle costs of a transition. Defaults follow the closed-page
/// timing of the simulated parts: a row walk pays tRCD+tCAS of the cache
/// (8+8), an in-cache migration rides the wide internal bus (4), a writeback
/// pays the off-chip tRCD+tCAS (11+11).
struct TransitionCosts {
  uint32_t row_walk_cycles = 16;
  uint32_t line_migrate_cycles = 4;
  uint32_t line_writeback_cycles = 22;
  /// 0 = walk and transfer fully serialized; 1 = shorter phase fully hidden.
  double overlap_fraction = 0.0;
};

struct TransitionEnergyModel {
  double row_read_nj = 5.0;    // activate + row read
  double migrate_nj = 8.0;     // in-cache read + write
  double writeback_nj = 16.0;  // cache read + off-chip write
};

struct TransitionPolicy {
  Discovery discovery = Discovery::kHier;
  DirtyHandling handling = DirtyHandling::kMigrate;
  TransitionCosts costs;
  TransitionEnergyModel energy;
  /// Transitions to an all-off mask are rejected unless the sizing policy
  /// explicitly decided to shut the whole cache down.
  bool allow_full_shutdown = false;
};

struct TransitionReport {
  uint64_t latency_cycles = 0;
  uint64_t rows_walked = 0;
  uint64_t nodes_visited = 0;  // dirty-tree counters read (hier discovery)
  uint64_t lines_migrated = 0;
  uint64_t lines_written_back = 0;
  uint64_t clean_lines_dropped = 0;
  double energy_nj = 0.0;

  static std::string csv_header();
  std::string csv_row() const;
  std::string to_text() const;
};

/// Called with the full line address of every line written back to memory.
using WritebackSink = std::function<void(uint64_t line_address)>;

/// Shuts down the banks in `before \ after`. BFO and CRUNCH walk only those
/// banks; MRI walks every active bank because the whole mapping reshuffles.
/// Dirty lines whose bank changes are migrated (or written back, per policy);
/// clean remapped lines are dropped. Newly-down banks end empty and powered
/// off. Demand traffic is assumed blocked for the duration.
TransitionReport power_down(DramCache& cache, const BankMapper& mapper,
                            const ActiveBankMask& before, const ActiveBankMask& after,
                            const TransitionPolicy& policy,
                            const WritebackSink& sink = {});

/// Brings up the banks in `after \ before` and repatriates displaced lines.
/// BFO searches only the fail-over bank of each returning bank; CRUNCH and
/// MRI search every previously active bank.
TransitionReport power_up(DramCache& cache, const BankMapper& mapper,
                          const ActiveBankMask& before, const ActiveBankMask& after,
                          const TransitionPolicy& policy, const WritebackSink& sink = {});

double transition_energy(const TransitionReport& report, const TransitionEnergyModel& model);

}  // namespace crunchsim
