#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "crunchsim/geometry.hpp"
#include "crunchsim/hier.hpp"

namespace crunchsim {

enum class AccessType { kRead, kWrite };

struct CacheLine {
  uint64_t tag = 0;  // full line address
  bool dirty = false;
};

struct EvictedLine {
  uint64_t tag = 0;
  bool dirty = false;  // dirty victims must be written back by the caller
};

struct AccessResult {
  bool hit = false;
  std::optional<EvictedLine> victim;
};

/// Set-associative DRAM cache with exact LRU per row. One instance covers all
/// channels; bank power state is uniform across channels. Each (channel, bank)
/// carries a DirtyRowTree that mirrors row-level dirty occupancy, updated on
/// every 0<->nonzero transition of a row's dirty population.
class DramCache {
 public:
  explicit DramCache(const CacheGeometry& geom);

  /// Lookup/fill path. Hits refresh LRU and set the dirty bit on writes;
  /// misses insert at MRU and hand back the LRU victim when the row is full.
  /// Accessing a powered-down bank throws std::logic_error (a scheme bug).
  AccessResult access(const DecodedAddress& addr, uint32_t bank, AccessType type);

  /// Fill path shared by demand misses and migrations. The tag must not
  /// already be present in the row.
  std::optional<EvictedLine> insert_line(uint32_t channel, uint32_t bank, uint32_t row,
                                         uint64_t tag, bool dirty);

  /// Removes a line if present, preserving the LRU order of the rest.
  std::optional<CacheLine> extract_line(uint32_t channel, uint32_t bank, uint32_t row,
                                        uint64_t tag);

  /// Invalidates every line of the bank in every channel.
  void clear_bank(uint32_t bank);

  bool bank_powered(uint32_t bank) const;
  /// Powering a bank off requires it to be empty in every channel.
  void set_bank_powered(uint32_t bank, bool powered);
  void apply_power_state(uint32_t powered_bits);

  std::span<const CacheLine> row(uint32_t channel, uint32_t bank, uint32_t row_index) const;
  const DirtyRowTree& dirty_tree(uint32_t channel, uint32_t bank) const;

  uint64_t line_count() const { return lines_; }
  uint64_t line_count_in_bank(uint32_t bank) const;
  uint64_t dirty_line_count() const { return dirty_lines_; }
  uint64_t dirty_line_count_in_bank(uint32_t bank) const;
  std::vector<uint64_t> dirty_line_addresses() const;  // sorted tags

  const CacheGeometry& geometry() const { return geom_; }

 private:
  struct Row {
    std::vector<CacheLine> lines;  // MRU first; position is the LRU rank
    uint32_t dirty_count = 0;
  };

  Row& row_ref(uint32_t channel, uint32_t bank, uint32_t row_index);
  const Row& row_ref(uint32_t channel, uint32_t bank, uint32_t row_index) const;
  void line_dirtied(Row& r, uint32_t channel, uint32_t bank, uint32_t row_index);
  void line_cleaned(Row& r, uint32_t channel, uint32_t bank, uint32_t row_index);

  CacheGeometry geom_;
  std::vector<Row> rows_;           // [channel][bank][row], flattened
  std::vector<DirtyRowTree> trees_;  // [channel][bank]
  uint32_t powered_bits_ = 0;
  uint64_t lines_ = 0;
  uint64_t dirty_lines_ = 0;
};

}  // namespace crunchsim
