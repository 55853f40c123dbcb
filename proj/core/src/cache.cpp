#include "crunchsim/cache.hpp"

#include <algorithm>
#include <stdexcept>

namespace crunchsim {

DramCache::DramCache(const CacheGeometry& geom) : geom_(geom) {
  geom_.validate();
  rows_.resize(size_t(geom_.channels) * geom_.banks_per_channel * geom_.rows_per_bank);
  trees_.reserve(size_t(geom_.channels) * geom_.banks_per_channel);
  for (uint32_t i = 0; i < geom_.channels * geom_.banks_per_channel; ++i)
    trees_.emplace_back(geom_.rows_per_bank);
  powered_bits_ = (1u << geom_.banks_per_channel) - 1u;
}

DramCache::Row& DramCache::row_ref(uint32_t channel, uint32_t bank, uint32_t row_index) {
  return rows_[(size_t(channel) * geom_.banks_per_channel + bank) * geom_.rows_per_bank +
               row_index];
}

const DramCache::Row& DramCache::row_ref(uint32_t channel, uint32_t bank,
                                         uint32_t row_index) const {
  return rows_[(size_t(channel) * geom_.banks_per_channel + bank) * geom_.rows_per_bank +
               row_index];
}

void DramCache::line_dirtied(Row& r, uint32_t channel, uint32_t bank, uint32_t row_index) {
  ++dirty_lines_;
  if (++r.dirty_count == 1)
    trees_[size_t(channel) * geom_.banks_per_channel + bank].set(row_index, true);
}

void DramCache::line_cleaned(Row& r, uint32_t channel, uint32_t bank, uint32_t row_index) {
  --dirty_lines_;
  if (--r.dirty_count == 0)
    trees_[size_t(channel) * geom_.banks_per_channel + bank].set(row_index, false);
}

AccessResult DramCache::access(const DecodedAddress& addr, uint32_t bank, AccessType type) {
  if (bank >= geom_.banks_per_channel) throw std::out_of_range("cache: bank out of range");
  if (!bank_powered(bank))
    throw std::logic_error("cache: access routed to powered-down bank " + std::to_string(bank));
  if (addr.channel >= geom_.channels || addr.row_index >= geom_.rows_per_bank)
    throw std::out_of_range("cache: decoded address out of range");

  Row& r = row_ref(addr.channel, bank, addr.row_index);
  for (size_t i = 0; i < r.lines.size(); ++i) {
    if (r.lines[i].tag != addr.tag) continue;
    CacheLine line = r.lines[i];
    r.lines.erase(r.lines.begin() + long(i));
    if (type == AccessType::kWrite && !line.dirty) {
      line.dirty = true;
      line_dirtied(r, addr.channel, bank, addr.row_index);
    }
    r.lines.insert(r.lines.begin(), line);
    return {true, std::nullopt};
  }

  AccessResult result;
  result.victim =
      insert_line(addr.channel, bank, addr.row_index, addr.tag, type == AccessType::kWrite);
  return result;
}

std::optional<EvictedLine> DramCache::insert_line(uint32_t channel, uint32_t bank,
                                                  uint32_t row_index, uint64_t tag,
                                                  bool dirty) {
  if (!bank_powered(bank))
    throw std::logic_error("cache: insert into powered-down bank " + std::to_string(bank));
  Row& r = row_ref(channel, bank, row_index);
  std::optional<EvictedLine> victim;
  if (r.lines.size() >= geom_.data_ways) {
    const CacheLine lru = r.lines.back();
    r.lines.pop_back();
    --lines_;
    if (lru.dirty) line_cleaned(r, channel, bank, row_index);
    victim = EvictedLine{lru.tag, lru.dirty};
  }
  r.lines.insert(r.lines.begin(), CacheLine{tag, dirty});
  ++lines_;
  if (dirty) line_dirtied(r, channel, bank, row_index);
  return victim;
}

std::optional<CacheLine> DramCache::extract_line(uint32_t channel, uint32_t bank,
                                                 uint32_t row_index, uint64_t tag) {
  Row& r = row_ref(channel, bank, row_index);
  for (size_t i = 0; i < r.lines.size(); ++i) {
    if (r.lines[i].tag != tag) continue;
    CacheLine line = r.lines[i];
    r.lines.erase(r.lines.begin() + long(i));
    --lines_;
    if (line.dirty) line_cleaned(r, channel, bank, row_index);
    return line;
  }
  return std::nullopt;
}

void DramCache::clear_bank(uint32_t bank) {
  for (uint32_t ch = 0; ch < geom_.channels; ++ch) {
    for (uint32_t ri = 0; ri < geom_.rows_per_bank; ++ri) {
      Row& r = row_ref(ch, bank, ri);
      lines_ -= r.lines.size();
      dirty_lines_ -= r.dirty_count;
      r.lines.clear();
      r.dirty_count = 0;
    }
    trees_[size_t(ch) * geom_.banks_per_channel + bank].clear();
  }
}

bool DramCache::bank_powered(uint32_t bank) const { return (powered_bits_ >> bank) & 1u; }

void DramCache::set_bank_powered(uint32_t bank, bool powered) {
  if (bank >= geom_.banks_per_channel) throw std::out_of_range("cache: bank out of range");
  if (!powered && line_count_in_bank(bank) != 0)
    throw std::logic_error("cache: powering down bank " + std::to_string(bank) +
                           " with resident lines");
  if (powered)
    powered_bits_ |= 1u << bank;
  else
    powered_bits_ &= ~(1u << bank);
}

void DramCache::apply_power_state(uint32_t powered_bits) {
  for (uint32_t b = 0; b < geom_.banks_per_channel; ++b)
    set_bank_powered(b, (powered_bits >> b) & 1u);
}

std::span<const CacheLine> DramCache::row(uint32_t channel, uint32_t bank,
                                          uint32_t row_index) const {
  const Row& r = row_ref(channel, bank, row_index);
  return {r.lines.data(), r.lines.size()};
}

const DirtyRowTree& DramCache::dirty_tree(uint32_t channel, uint32_t bank) const {
  return trees_[size_t(channel) * geom_.banks_per_channel + bank];
}

uint64_t DramCache::line_count_in_bank(uint32_t bank) const {
  uint64_t n = 0;
  for (uint32_t ch = 0; ch < geom_.channels; ++ch)
    for (uint32_t ri = 0; ri < geom_.rows_per_bank; ++ri)
      n += row_ref(ch, bank, ri).lines.size();
  return n;
}

uint64_t DramCache::dirty_line_count_in_bank(uint32_t bank) const {
  uint64_t n = 0;
  for (uint32_t ch = 0; ch < geom_.channels; ++ch)
    for (uint32_t ri = 0; ri < geom_.rows_per_bank; ++ri)
      n += row_ref(ch, bank, ri).dirty_count;
  return n;
}

std::vector<uint64_t> DramCache::dirty_line_addresses() const {
  std::vector<uint64_t> out;
  out.reserve(dirty_lines_);
  for (const Row& r : rows_)
    for (const CacheLine& line : r.lines)
      if (line.dirty) out.push_back(line.tag);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace crunchsim
