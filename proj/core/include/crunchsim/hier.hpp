#pragma once

#include <cstdint>
#include <vector>

namespace crunchsim {

/// Per-bank hierarchy of dirty-row counters. Leaves are one flag per DRAM row
/// (any dirty line present); each internal counter holds the number of dirty
/// rows in its subtree, so a walk can skip whole clean regions. The tree is a
/// perfectly balanced d-ary heap kept in flat per-level arrays.
class DirtyRowTree {
 public:
  /// Throws std::invalid_argument for arity < 2 or rows == 0.
  DirtyRowTree(uint32_t rows, uint32_t arity = 16);

  /// Sets/clears the per-row dirty flag. Repeating the current value is a
  /// no-op; ancestors are adjusted by +-1 only on an actual flip.
  void set(uint32_t row, bool dirty);

  bool leaf(uint32_t row) const;
  uint32_t dirty_rows() const;  // root counter
  void clear();

  struct EnumerateResult {
    std::vector<uint32_t> rows;  // ascending
    uint64_t nodes_visited = 0;  // counters read, including the root
  };

  /// Exact dirty-row set; subtrees with a zero counter are never descended.
  EnumerateResult enumerate() const;

  uint32_t rows() const { return rows_; }
  uint32_t arity() const { return arity_; }

  /// Hardware cost of one table: leaves are 1 bit, an internal node at height
  /// h is wide enough to count min(arity^h, rows) rows.
  static uint64_t storage_bits(uint32_t rows, uint32_t arity);
  uint64_t storage_bits() const { return storage_bits(rows_, arity_); }

  /// levels()[0] are the leaves, levels().back() holds the root.
  const std::vector<std::vector<uint32_t>>& levels() const { return levels_; }

 private:
  uint32_t rows_;
  uint32_t arity_;
  std::vector<std::vector<uint32_t>> levels_;
};

}  // namespace crunchsim
