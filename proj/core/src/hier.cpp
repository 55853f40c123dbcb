#include "crunchsim/hier.hpp"

#include <bit>
#include <stdexcept>

namespace crunchsim {

DirtyRowTree::DirtyRowTree(uint32_t rows, uint32_t arity) : rows_(rows), arity_(arity) {
  if (arity < 2) throw std::invalid_argument("hier: arity must be >= 2");
  if (rows == 0) throw std::invalid_argument("hier: rows must be >= 1");
  uint32_t n = rows;
  levels_.emplace_back(n, 0u);
  while (n > 1) {
    n = (n + arity - 1) / arity;
    levels_.emplace_back(n, 0u);
  }
}

void DirtyRowTree::set(uint32_t row, bool dirty) {
  if (row >= rows_) throw std::out_of_range("hier: row index out of range");
  const uint32_t want = dirty ? 1u : 0u;
  uint32_t& flag = levels_[0][row];
  if (flag == want) return;
  flag = want;
  const int32_t delta = dirty ? 1 : -1;
  uint32_t idx = row;
  for (size_t level = 1; level < levels_.size(); ++level) {
    idx /= arity_;
    levels_[level][idx] = uint32_t(int64_t(levels_[level][idx]) + delta);
  }
}

bool DirtyRowTree::leaf(uint32_t row) const {
  if (row >= rows_) throw std::out_of_range("hier: row index out of range");
  return levels_[0][row] != 0;
}

uint32_t DirtyRowTree::dirty_rows() const { return levels_.back()[0]; }

void DirtyRowTree::clear() {
  for (auto& lvl : levels_)
    for (auto& v : lvl) v = 0;
}

DirtyRowTree::EnumerateResult DirtyRowTree::enumerate() const {
  EnumerateResult out;
  out.nodes_visited = 1;  // root read
  if (dirty_rows() == 0) return out;
  const size_t top = levels_.size() - 1;
  if (top == 0) {  // single-row tree: the root is the leaf
    out.rows.push_back(0);
    return out;
  }
  // In-order descent keeps the output ascending. Reading each child counter
  // costs one visit; zero subtrees are pruned.
  auto descend = [&](auto&& self, size_t level, uint32_t node) -> void {
    const size_t child_level = level - 1;
    const uint32_t first = node * arity_;
    const uint32_t last =
        uint32_t(std::min<uint64_t>(uint64_t(first) + arity_, levels_[child_level].size()));
    for (uint32_t c = first; c < last; ++c) {
      ++out.nodes_visited;
      if (levels_[child_level][c] == 0) continue;
      if (child_level == 0)
        out.rows.push_back(c);
      else
        self(self, child_level, c);
    }
  };
  descend(descend, top, 0);
  return out;
}

uint64_t DirtyRowTree::storage_bits(uint32_t rows, uint32_t arity) {
  if (arity < 2) throw std::invalid_argument("hier: arity must be >= 2");
  if (rows == 0) throw std::invalid_argument("hier: rows must be >= 1");
  uint64_t bits = rows;  // 1-bit leaves
  uint64_t n = rows;
  uint64_t subtree = 1;
  while (n > 1) {
    n = (n + arity - 1) / arity;
    subtree = std::min<uint64_t>(subtree * arity, rows);
    bits += n * uint64_t(std::bit_width(subtree));
  }
  return bits;
}

}  // namespace crunchsim
