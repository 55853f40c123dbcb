#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "crunchsim/cache.hpp"

using namespace crunchsim;

namespace {

CacheGeometry small_geometry() {
  CacheGeometry g;
  g.channels = 1;
  g.banks_per_channel = 4;
  g.rows_per_bank = 16;
  g.row_bytes = 512;
  g.line_bytes = 64;
  g.data_ways = 4;
  return g;
}

// addresses that land in channel 0, row `row`, with distinct tags
uint64_t addr_for(const CacheGeometry& g, uint32_t row, uint32_t salt) {
  const uint64_t set_key = (row + uint64_t(salt) * g.rows_per_bank) << g.bank_bits();
  return (set_key << (g.offset_bits() + g.channel_bits()));
}

}  // namespace

TEST_CASE("cold cache misses with no victim") {
  DramCache cache(small_geometry());
  const auto d = decode(addr_for(cache.geometry(), 3, 0), cache.geometry());
  const auto res = cache.access(d, 1, AccessType::kRead);
  CHECK_FALSE(res.hit);
  CHECK_FALSE(res.victim.has_value());
  CHECK(cache.line_count() == 1);
}

TEST_CASE("write then read hits dirty") {
  DramCache cache(small_geometry());
  const auto d = decode(addr_for(cache.geometry(), 5, 1), cache.geometry());
  CHECK_FALSE(cache.access(d, 2, AccessType::kWrite).hit);
  const auto res = cache.access(d, 2, AccessType::kRead);
  CHECK(res.hit);
  CHECK(cache.dirty_line_count() == 1);
  CHECK(cache.dirty_tree(0, 2).leaf(d.row_index));
}

TEST_CASE("filling a row evicts the first-inserted line") {
  const CacheGeometry g = small_geometry();
  DramCache cache(g);
  const uint32_t row = 7;
  for (uint32_t i = 0; i < g.data_ways; ++i) {
    const auto res =
        cache.access(decode(addr_for(g, row, i), g), 0, AccessType::kRead);
    CHECK_FALSE(res.victim.has_value());
  }
  const auto res =
      cache.access(decode(addr_for(g, row, g.data_ways), g), 0, AccessType::kRead);
  CHECK_FALSE(res.hit);
  REQUIRE(res.victim.has_value());
  CHECK(res.victim->tag == decode(addr_for(g, row, 0), g).tag);  // LRU = first in
  CHECK_FALSE(res.victim->dirty);
  CHECK(cache.row(0, 0, row).size() == g.data_ways);
}

TEST_CASE("lru refresh protects recently touched lines") {
  const CacheGeometry g = small_geometry();
  DramCache cache(g);
  const uint32_t row = 2;
  for (uint32_t i = 0; i < g.data_ways; ++i)
    cache.access(decode(addr_for(g, row, i), g), 0, AccessType::kRead);
  // touch line 0 again, so line 1 becomes LRU
  cache.access(decode(addr_for(g, row, 0), g), 0, AccessType::kRead);
  const auto res =
      cache.access(decode(addr_for(g, row, g.data_ways), g), 0, AccessType::kRead);
  REQUIRE(res.victim.has_value());
  CHECK(res.victim->tag == decode(addr_for(g, row, 1), g).tag);
}

TEST_CASE("dirty victim is reported for writeback") {
  const CacheGeometry g = small_geometry();
  DramCache cache(g);
  const uint32_t row = 9;
  cache.access(decode(addr_for(g, row, 0), g), 3, AccessType::kWrite);
  for (uint32_t i = 1; i < g.data_ways; ++i)
    cache.access(decode(addr_for(g, row, i), g), 3, AccessType::kRead);
  const auto res =
      cache.access(decode(addr_for(g, row, g.data_ways), g), 3, AccessType::kRead);
  REQUIRE(res.victim.has_value());
  CHECK(res.victim->dirty);
  CHECK(cache.dirty_line_count() == 0);  // the dirty line left the cache
  CHECK_FALSE(cache.dirty_tree(0, 3).leaf(row));
}

TEST_CASE("accessing a powered-down bank is a contract violation") {
  DramCache cache(small_geometry());
  cache.set_bank_powered(1, false);
  const auto d = decode(addr_for(cache.geometry(), 0, 0), cache.geometry());
  CHECK_THROWS_AS(cache.access(d, 1, AccessType::kRead), std::logic_error);
  CHECK_THROWS_AS(cache.insert_line(0, 1, 0, 42, false), std::logic_error);
}

TEST_CASE("powering down a bank with resident lines is rejected") {
  DramCache cache(small_geometry());
  const auto d = decode(addr_for(cache.geometry(), 0, 0), cache.geometry());
  cache.access(d, 0, AccessType::kRead);
  CHECK_THROWS_AS(cache.set_bank_powered(0, false), std::logic_error);
  cache.clear_bank(0);
  CHECK_NOTHROW(cache.set_bank_powered(0, false));
}

TEST_CASE("random op stream keeps occupancy bounded and hier consistent") {
  const CacheGeometry g = small_geometry();
  DramCache cache(g);
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100000; ++i) {
    const uint32_t row = uint32_t(rng() % g.rows_per_bank);
    const uint32_t salt = uint32_t(rng() % (2 * g.data_ways));
    const uint32_t bank = uint32_t(rng() % g.banks_per_channel);
    const AccessType op = (rng() & 1) ? AccessType::kWrite : AccessType::kRead;
    cache.access(decode(addr_for(g, row, salt), g), bank, op);
  }
  uint64_t dirty_total = 0;
  for (uint32_t bank = 0; bank < g.banks_per_channel; ++bank)
    for (uint32_t row = 0; row < g.rows_per_bank; ++row) {
      const auto lines = cache.row(0, bank, row);
      CHECK(lines.size() <= g.data_ways);
      uint32_t row_dirty = 0;
      for (const CacheLine& line : lines) row_dirty += line.dirty;
      dirty_total += row_dirty;
      // every dirty line is visible in the tree's leaf for its row
      CHECK(cache.dirty_tree(0, bank).leaf(row) == (row_dirty > 0));
    }
  CHECK(cache.dirty_line_count() == dirty_total);
}

TEST_CASE("extract preserves the remaining stack order") {
  const CacheGeometry g = small_geometry();
  DramCache cache(g);
  const uint32_t row = 4;
  for (uint32_t i = 0; i < 3; ++i)
    cache.access(decode(addr_for(g, row, i), g), 0, AccessType::kRead);
  const uint64_t middle = decode(addr_for(g, row, 1), g).tag;
  const auto line = cache.extract_line(0, 0, row, middle);
  REQUIRE(line.has_value());
  CHECK(line->tag == middle);
  const auto lines = cache.row(0, 0, row);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0].tag == decode(addr_for(g, row, 2), g).tag);  // MRU unchanged
  CHECK(lines[1].tag == decode(addr_for(g, row, 0), g).tag);
  CHECK_FALSE(cache.extract_line(0, 0, row, middle).has_value());
}
