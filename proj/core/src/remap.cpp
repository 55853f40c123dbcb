#include "crunchsim/remap.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace crunchsim {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kBfo: return "bfo";
    case Scheme::kMri: return "mri";
    case Scheme::kCrunch: return "crunch";
  }
  return "?";
}

Scheme scheme_from_string(std::string_view name) {
  if (name == "bfo") return Scheme::kBfo;
  if (name == "mri") return Scheme::kMri;
  if (name == "crunch") return Scheme::kCrunch;
  throw std::invalid_argument("unknown scheme '" + std::string(name) +
                              "' (expected bfo|mri|crunch)");
}

ActiveBankMask::ActiveBankMask(uint32_t banks, uint32_t bits) : banks_(banks), bits_(bits) {
  if (banks == 0 || banks > 31) throw std::invalid_argument("mask: banks must be in 1..31");
  if (bits >> banks) throw std::invalid_argument("mask: bits outside bank range");
}

ActiveBankMask ActiveBankMask::all_on(uint32_t banks) {
  if (banks == 0 || banks > 31) throw std::invalid_argument("mask: banks must be in 1..31");
  return ActiveBankMask(banks, (1u << banks) - 1u);
}

ActiveBankMask ActiveBankMask::none(uint32_t banks) { return ActiveBankMask(banks, 0); }

ActiveBankMask ActiveBankMask::from_pattern(std::string_view pattern) {
  if (pattern.empty() || pattern.size() > 31)
    throw std::invalid_argument("mask: pattern length must be 1..31");
  uint32_t bits = 0;
  for (size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] == '1')
      bits |= 1u << i;  // leftmost character is bank 0
    else if (pattern[i] != '0')
      throw std::invalid_argument("mask: pattern must contain only '0'/'1', got '" +
                                  std::string(pattern) + "'");
  }
  return ActiveBankMask(uint32_t(pattern.size()), bits);
}

std::string ActiveBankMask::to_pattern() const {
  std::string s(banks_, '0');
  for (uint32_t b = 0; b < banks_; ++b)
    if (active(b)) s[b] = '1';
  return s;
}

ActiveBankMask& ActiveBankMask::set(uint32_t bank, bool on) {
  if (bank >= banks_) throw std::out_of_range("mask: bank index out of range");
  if (on)
    bits_ |= 1u << bank;
  else
    bits_ &= ~(1u << bank);
  return *this;
}

uint32_t ActiveBankMask::active_count() const { return uint32_t(std::popcount(bits_)); }

std::vector<uint32_t> ActiveBankMask::active_banks() const {
  std::vector<uint32_t> out;
  out.reserve(active_count());
  for (uint32_t b = 0; b < banks_; ++b)
    if (active(b)) out.push_back(b);
  return out;
}

bool ActiveBankMask::is_subset_of(const ActiveBankMask& other) const {
  return banks_ == other.banks_ && (bits_ & ~other.bits_) == 0;
}

uint64_t RegionRemapTable::entry_bits() const {
  return uint64_t(banks) * std::bit_width(banks - 1u);
}

uint64_t RegionRemapTable::table_bits() const { return uint64_t(super_regions) * entry_bits(); }

uint64_t RegionRemapTable::table_bytes() const { return (table_bits() + 7) / 8; }

namespace {

// Rotate so the row starts with bank 0; rotation-equivalent rows share this form.
std::vector<uint8_t> canonical_rotation(const std::vector<uint8_t>& row) {
  auto it = std::find(row.begin(), row.end(), uint8_t(0));
  std::vector<uint8_t> canon(row.size());
  const size_t shift = size_t(it - row.begin());
  for (size_t i = 0; i < row.size(); ++i) canon[i] = row[(shift + i) % row.size()];
  return canon;
}

}  // namespace

std::vector<std::string> RegionRemapTable::validate() const {
  std::vector<std::string> problems;
  if (banks < 2) problems.push_back("banks must be >= 2");
  if (super_regions == 0) problems.push_back("super_regions must be >= 1");
  if (permutations.size() != super_regions)
    problems.push_back("expected " + std::to_string(super_regions) + " rows, found " +
                       std::to_string(permutations.size()));
  if (!problems.empty()) return problems;

  for (uint32_t s = 0; s < super_regions; ++s) {
    const auto& row = permutations[s];
    std::vector<bool> seen(banks, false);
    bool ok = row.size() == banks;
    if (ok)
      for (uint8_t b : row) {
        if (b >= banks || seen[b]) {
          ok = false;
          break;
        }
        seen[b] = true;
      }
    if (!ok) problems.push_back("row " + std::to_string(s) + " is not a permutation of 0.." +
                                std::to_string(banks - 1));
  }
  if (!problems.empty()) return problems;

  for (uint32_t a = 0; a < super_regions; ++a) {
    const auto canon_a = canonical_rotation(permutations[a]);
    for (uint32_t b = a + 1; b < super_regions; ++b)
      if (canon_a == canonical_rotation(permutations[b]))
        problems.push_back("rows " + std::to_string(a) + " and " + std::to_string(b) +
                           " are rotation equivalent");
  }

  // One-failure balance: each bank's cyclic successors must be spread evenly.
  const uint32_t lo = super_regions / (banks - 1);
  const uint32_t hi = (super_regions + banks - 2) / (banks - 1);
  std::vector<std::vector<uint32_t>> succ(banks, std::vector<uint32_t>(banks, 0));
  for (const auto& row : permutations)
    for (uint32_t i = 0; i < banks; ++i) succ[row[i]][row[(i + 1) % banks]]++;
  for (uint32_t b = 0; b < banks; ++b)
    for (uint32_t c = 0; c < banks; ++c) {
      if (b == c) continue;
      if (succ[b][c] < lo || succ[b][c] > hi)
        problems.push_back("bank " + std::to_string(c) + " follows bank " + std::to_string(b) +
                           " in " + std::to_string(succ[b][c]) + " rows (want " +
                           std::to_string(lo) + ".." + std::to_string(hi) + ")");
    }
  return problems;
}

std::string RegionRemapTable::serialize() const {
  std::ostringstream out;
  out << "rrt " << banks << ' ' << super_regions << ' ' << seed << '\n';
  for (const auto& row : permutations) {
    for (uint32_t i = 0; i < row.size(); ++i) out << (i ? " " : "") << uint32_t(row[i]);
    out << '\n';
  }
  return out.str();
}

RegionRemapTable RegionRemapTable::deserialize(std::istream& in) {
  RegionRemapTable t;
  std::string magic;
  if (!(in >> magic) || magic != "rrt")
    throw std::invalid_argument("rrt: missing 'rrt' header");
  if (!(in >> t.banks >> t.super_regions >> t.seed))
    throw std::invalid_argument("rrt: malformed header");
  if (t.banks < 2 || t.banks > 255 || t.super_regions == 0)
    throw std::invalid_argument("rrt: header values out of range");
  t.permutations.assign(t.super_regions, {});
  for (uint32_t s = 0; s < t.super_regions; ++s) {
    auto& row = t.permutations[s];
    row.resize(t.banks);
    for (uint32_t i = 0; i < t.banks; ++i) {
      uint32_t v;
      if (!(in >> v) || v >= t.banks)
        throw std::invalid_argument("rrt: bad entry in row " + std::to_string(s));
      row[i] = uint8_t(v);
    }
  }
  return t;
}

RegionRemapTable RegionRemapTable::deserialize(const std::string& text) {
  std::istringstream in(text);
  return deserialize(in);
}

uint64_t rotation_class_count(uint32_t banks) {
  if (banks < 2) throw std::invalid_argument("rrt: banks must be >= 2");
  uint64_t n = 1;
  for (uint32_t i = 2; i < banks; ++i) {
    if (n > UINT64_MAX / i) return UINT64_MAX;
    n *= i;
  }
  return n;
}

namespace {

// One row = a random successor walk over all banks, never pushing a cyclic
// successor pair above `cap` uses. Each row hands every bank exactly one
// successor slot, so a bank whose below-floor deficit equals the rows still
// to be placed must spend this slot on a below-floor pair; the walk enforces
// that and otherwise prefers below-floor pairs, which keeps tight shapes
// (super_regions near a multiple of banks-1) reachable. Empty on a dead end.
std::vector<uint8_t> random_capacity_walk(std::mt19937_64& rng,
                                          const std::vector<std::vector<uint32_t>>& succ,
                                          const std::vector<uint32_t>& deficit,
                                          uint32_t rows_left, uint32_t floor, uint32_t cap,
                                          uint32_t banks) {
  const auto weight = [&](uint32_t from, uint32_t to) -> uint64_t {
    if (succ[from][to] >= cap) return 0;
    const bool below = succ[from][to] < floor;
    if (!below && deficit[from] >= rows_left) return 0;  // slot owed to the deficit
    return below ? 1 + 16 * uint64_t(floor - succ[from][to]) : 1;
  };
  std::vector<uint8_t> row;
  row.reserve(banks);
  std::vector<bool> used(banks, false);
  uint32_t cur = uint32_t(rng() % banks);
  row.push_back(uint8_t(cur));
  used[cur] = true;
  for (uint32_t step = 1; step < banks; ++step) {
    uint64_t total = 0;
    for (uint32_t c = 0; c < banks; ++c)
      if (!used[c]) total += weight(cur, c);
    if (total == 0) return {};
    uint64_t pick = rng() % total;
    uint32_t next = banks;
    for (uint32_t c = 0; c < banks; ++c) {
      if (used[c]) continue;
      const uint64_t w = weight(cur, c);
      if (pick < w) {
        next = c;
        break;
      }
      pick -= w;
    }
    row.push_back(uint8_t(next));
    used[next] = true;
    cur = next;
  }
  // wrap-around edge closes the cycle and must obey the same rules
  if (weight(cur, row[0]) == 0) return {};
  return row;
}

}  // namespace

RegionRemapTable rrt_generate(uint32_t banks, uint32_t super_regions, uint64_t seed) {
  if (banks < 2 || banks > 255) throw std::invalid_argument("rrt: banks must be in 2..255");
  if (super_regions == 0) throw std::invalid_argument("rrt: super_regions must be >= 1");
  if (super_regions > rotation_class_count(banks))
    throw std::invalid_argument("rrt: only " + std::to_string(rotation_class_count(banks)) +
                                " rotation classes exist for " + std::to_string(banks) +
                                " banks; cannot pick " + std::to_string(super_regions) +
                                " inequivalent rows");

  const uint32_t lo = super_regions / (banks - 1);
  const uint32_t cap = (super_regions + banks - 2) / (banks - 1);
  constexpr uint32_t kMaxAttempts = 50000;
  constexpr uint32_t kRowTries = 256;

  std::mt19937_64 rng(seed);
  uint64_t rows_built_total = 0;

  for (uint32_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::vector<std::vector<uint32_t>> succ(banks, std::vector<uint32_t>(banks, 0));
    // per-bank count of successor slots still needed to reach the floor
    std::vector<uint32_t> deficit(banks, (banks - 1) * lo);
    std::set<std::vector<uint8_t>> seen;
    std::vector<std::vector<uint8_t>> rows;
    rows.reserve(super_regions);

    bool dead = false;
    for (uint32_t s = 0; s < super_regions && !dead; ++s) {
      const uint32_t rows_left = super_regions - s;
      bool placed = false;
      for (uint32_t t = 0; t < kRowTries; ++t) {
        auto row = random_capacity_walk(rng, succ, deficit, rows_left, lo, cap, banks);
        if (row.empty()) continue;
        if (!seen.insert(canonical_rotation(row)).second) continue;
        for (uint32_t i = 0; i < banks; ++i) {
          const uint32_t from = row[i];
          const uint32_t to = row[(i + 1) % banks];
          if (succ[from][to]++ < lo) --deficit[from];
        }
        rows.push_back(std::move(row));
        placed = true;
        break;
      }
      if (!placed) dead = true;
      // a bank owing more below-floor slots than rows remain cannot recover
      for (uint32_t b = 0; b < banks && !dead; ++b)
        if (deficit[b] > rows_left - 1) dead = true;
    }
    rows_built_total += rows.size();
    if (dead) continue;

    bool balanced = true;
    for (uint32_t b = 0; b < banks && balanced; ++b)
      for (uint32_t c = 0; c < banks; ++c)
        if (b != c && succ[b][c] < lo) {
          balanced = false;
          break;
        }
    if (!balanced) continue;

    RegionRemapTable table;
    table.banks = banks;
    table.super_regions = super_regions;
    table.seed = seed;
    table.permutations = std::move(rows);
    return table;
  }
  throw std::runtime_error(
      "rrt: generation budget exhausted after " + std::to_string(kMaxAttempts) +
      " attempts (" + std::to_string(rows_built_total) + " rows placed in total) for banks=" +
      std::to_string(banks) + " super_regions=" + std::to_string(super_regions));
}

uint32_t bfo_home_bank(uint64_t set_key, uint32_t banks) {
  return uint32_t(set_key & (banks - 1));
}

uint32_t bfo_bank(uint32_t home_bank, const ActiveBankMask& mask) {
  if (mask.empty()) throw std::invalid_argument("bfo: no active banks");
  if (home_bank >= mask.banks()) throw std::out_of_range("bfo: home bank out of range");
  for (uint32_t i = 0; i < mask.banks(); ++i) {
    const uint32_t b = (home_bank + i) % mask.banks();
    if (mask.active(b)) return b;
  }
  throw std::invalid_argument("bfo: no active banks");
}

uint32_t mri_bank(uint64_t set_key, const ActiveBankMask& mask) {
  const uint32_t k = mask.active_count();
  if (k == 0) throw std::invalid_argument("mri: no active banks");
  uint32_t j = uint32_t(set_key % k);
  for (uint32_t b = 0; b < mask.banks(); ++b) {
    if (!mask.active(b)) continue;
    if (j == 0) return b;
    --j;
  }
  throw std::invalid_argument("mri: no active banks");
}

uint8_t region_fold(uint64_t set_key) {
  uint8_t fold = 0;
  while (set_key) {
    fold ^= uint8_t(set_key & 0xFF);
    set_key >>= 8;
  }
  return fold;
}

RegionId region_of(uint64_t set_key, uint32_t banks, uint32_t super_regions) {
  const uint8_t fold = region_fold(set_key);
  RegionId id;
  id.position = fold % banks;
  id.super_region = (fold / banks) % super_regions;
  return id;
}

uint32_t crunch_bank(const RegionId& region, const RegionRemapTable& rrt,
                     const ActiveBankMask& mask) {
  if (mask.empty()) throw std::invalid_argument("crunch: no active banks");
  if (region.super_region >= rrt.super_regions || region.position >= rrt.banks)
    throw std::out_of_range("crunch: region outside table");
  const auto& perm = rrt.permutations[region.super_region];
  for (uint32_t i = 0; i < rrt.banks; ++i) {
    const uint32_t b = perm[(region.position + i) % rrt.banks];
    if (b < mask.banks() && mask.active(b)) return b;
  }
  throw std::invalid_argument("crunch: no active banks");
}

uint32_t BankMapper::map(uint64_t set_key, const ActiveBankMask& mask) const {
  switch (scheme) {
    case Scheme::kBfo: return bfo_bank(bfo_home_bank(set_key, mask.banks()), mask);
    case Scheme::kMri: return mri_bank(set_key, mask);
    case Scheme::kCrunch:
      if (!rrt) throw std::logic_error("crunch mapper without a remap table");
      return crunch_bank(region_of(set_key, rrt->banks, rrt->super_regions), *rrt, mask);
  }
  throw std::logic_error("unreachable");
}

RemapDelta remap_delta(Scheme scheme, const ActiveBankMask& before,
                       const ActiveBankMask& after, const RegionRemapTable* rrt) {
  if (before.banks() != after.banks())
    throw std::invalid_argument("remap_delta: mask widths differ");
  RemapDelta delta;
  delta.scheme = scheme;
  switch (scheme) {
    case Scheme::kCrunch: {
      if (!rrt) throw std::invalid_argument("remap_delta: crunch needs a remap table");
      for (uint32_t s = 0; s < rrt->super_regions; ++s)
        for (uint32_t p = 0; p < rrt->banks; ++p) {
          const RegionId r{s, p};
          if (crunch_bank(r, *rrt, before) != crunch_bank(r, *rrt, after))
            delta.moved_regions.push_back(s * rrt->banks + p);
        }
      // The fold spreads uniform keys evenly over regions, so the region
      // share is the exact key fraction.
      delta.moved_key_fraction = double(delta.moved_regions.size()) / double(rrt->regions());
      break;
    }
    case Scheme::kBfo: {
      for (uint32_t h = 0; h < before.banks(); ++h)
        if (bfo_bank(h, before) != bfo_bank(h, after)) delta.moved_home_banks.push_back(h);
      delta.moved_key_fraction =
          double(delta.moved_home_banks.size()) / double(before.banks());
      break;
    }
    case Scheme::kMri: {
      const uint64_t kb = before.active_count();
      const uint64_t ka = after.active_count();
      if (kb == 0 || ka == 0) throw std::invalid_argument("remap_delta: empty mask");
      const uint64_t l = std::lcm(kb, ka);
      uint64_t moved = 0;
      for (uint64_t r = 0; r < l; ++r)
        if (mri_bank(r, before) != mri_bank(r, after)) ++moved;
      delta.moved_key_fraction = double(moved) / double(l);
      break;
    }
  }
  return delta;
}

}  // namespace crunchsim
