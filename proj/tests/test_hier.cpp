#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>

#include "crunchsim/hier.hpp"

using namespace crunchsim;

TEST_CASE("storage cost of the 2048-row 16-ary table") {
  // 2048 leaf bits + 128 x 5 + 8 x 9 + one 12-bit root
  CHECK(DirtyRowTree::storage_bits(2048, 16) == 2772);
  // whole 128MB cache: 32 banks
  CHECK(DirtyRowTree::storage_bits(2048, 16) * 32 == 88704);  // ~10.8 KB
}

TEST_CASE("storage cost edge shapes") {
  CHECK(DirtyRowTree::storage_bits(16, 16) == 21);  // 16 leaves + 5-bit root
  CHECK(DirtyRowTree::storage_bits(1, 2) == 1);     // single row, root == leaf
  CHECK_THROWS_AS(DirtyRowTree::storage_bits(8, 1), std::invalid_argument);
}

TEST_CASE("fresh tree is clean") {
  DirtyRowTree t(2048, 16);
  CHECK(t.dirty_rows() == 0);
  auto en = t.enumerate();
  CHECK(en.rows.empty());
  CHECK(en.nodes_visited == 1);  // only the root was read
}

TEST_CASE("set is idempotent and clear restores fresh state") {
  DirtyRowTree t(2048, 16);
  t.set(7, true);
  t.set(7, true);
  CHECK(t.dirty_rows() == 1);
  t.set(7, false);
  CHECK(t.dirty_rows() == 0);
  for (const auto& level : t.levels())
    for (uint32_t v : level) CHECK(v == 0);
}

TEST_CASE("ancestor counters follow the leaf paths") {
  DirtyRowTree t(2048, 16);
  t.set(0, true);
  t.set(2047, true);
  CHECK(t.dirty_rows() == 2);
  const auto& l1 = t.levels()[1];  // 128 counters of 16 rows each
  CHECK(l1[0] == 1);
  CHECK(l1[127] == 1);
  const auto& l2 = t.levels()[2];  // 8 counters of 256 rows each
  CHECK(l2[0] == 1);
  CHECK(l2[7] == 1);
}

TEST_CASE("row index out of range throws") {
  DirtyRowTree t(64, 4);
  CHECK_THROWS_AS(t.set(64, true), std::out_of_range);
}

TEST_CASE("all-dirty enumeration visits the whole tree") {
  DirtyRowTree t(2048, 16);
  for (uint32_t r = 0; r < 2048; ++r) t.set(r, true);
  auto en = t.enumerate();
  CHECK(en.rows.size() == 2048);
  CHECK(en.nodes_visited == 1 + 8 + 128 + 2048);
}

TEST_CASE("sparse enumeration prunes") {
  DirtyRowTree t(2048, 16);
  for (uint32_t r : {5u, 100u, 2000u}) t.set(r, true);
  auto en = t.enumerate();
  CHECK(en.rows == std::vector<uint32_t>{5, 100, 2000});
  CHECK(en.nodes_visited <= 3 * 3 * 16 + 16);
}

TEST_CASE("enumeration equals a brute-force leaf scan") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const uint32_t rows = 1 + uint32_t(rng() % 300);
    const uint32_t arity = 2 + uint32_t(rng() % 15);
    DirtyRowTree t(rows, arity);
    std::set<uint32_t> dirty;
    const uint32_t ops = uint32_t(rng() % 64);
    for (uint32_t i = 0; i < ops; ++i) {
      const uint32_t row = uint32_t(rng() % rows);
      const bool on = rng() & 1;
      t.set(row, on);
      if (on)
        dirty.insert(row);
      else
        dirty.erase(row);
    }
    const auto en = t.enumerate();
    CHECK(en.rows == std::vector<uint32_t>(dirty.begin(), dirty.end()));
    CHECK(t.dirty_rows() == dirty.size());
  }
}

TEST_CASE("counters stay consistent under a long random op stream") {
  DirtyRowTree t(512, 8);
  std::vector<uint32_t> leaves(512, 0);
  std::mt19937_64 rng(99);
  for (int i = 0; i < 100000; ++i) {
    const uint32_t row = uint32_t(rng() % 512);
    const bool on = rng() & 1;
    t.set(row, on);
    leaves[row] = on;
  }
  // recompute every internal counter from the leaves
  const auto& levels = t.levels();
  std::vector<uint32_t> expect = leaves;
  for (size_t lvl = 1; lvl < levels.size(); ++lvl) {
    std::vector<uint32_t> next((expect.size() + 7) / 8, 0);
    for (size_t i = 0; i < expect.size(); ++i) next[i / 8] += expect[i];
    for (size_t i = 0; i < next.size(); ++i) CHECK(levels[lvl][i] == next[i]);
    expect = next;
  }
}
