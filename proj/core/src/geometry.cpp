#include "crunchsim/geometry.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace crunchsim {

namespace {

bool is_pow2(uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

uint32_t log2_u32(uint32_t v) { return uint32_t(std::bit_width(v) - 1); }

}  // namespace

uint32_t CacheGeometry::offset_bits() const { return log2_u32(line_bytes); }
uint32_t CacheGeometry::channel_bits() const { return log2_u32(channels); }
uint32_t CacheGeometry::bank_bits() const { return log2_u32(banks_per_channel); }

void CacheGeometry::validate() const {
  auto need_pow2 = [](uint64_t v, const char* name) {
    if (!is_pow2(v))
      throw std::invalid_argument(std::string("geometry: ") + name +
                                  " must be a power of two, got " + std::to_string(v));
  };
  need_pow2(channels, "channels");
  need_pow2(banks_per_channel, "banks_per_channel");
  need_pow2(rows_per_bank, "rows_per_bank");
  need_pow2(row_bytes, "row_bytes");
  need_pow2(line_bytes, "line_bytes");
  // bank masks and pattern strings carry one bit/char per bank
  if (banks_per_channel > 16)
    throw std::invalid_argument("geometry: at most 16 banks per channel supported");
  if (data_ways == 0) throw std::invalid_argument("geometry: data_ways must be >= 1");
  if (row_bytes < line_bytes)
    throw std::invalid_argument("geometry: row_bytes smaller than line_bytes");
  // The row must fit data_ways lines plus at least one line slot of tags.
  if (uint64_t(row_bytes) / line_bytes < uint64_t(data_ways) + 1)
    throw std::invalid_argument(
        "geometry: row too small for " + std::to_string(data_ways) +
        " data ways plus a tag slot (" + std::to_string(row_bytes / line_bytes) +
        " line slots per row)");
}

DecodedAddress decode(uint64_t byte_address, const CacheGeometry& geom) {
  const uint64_t line = byte_address >> geom.offset_bits();
  return decode_line(line, geom);
}

DecodedAddress decode_line(uint64_t line_address, const CacheGeometry& geom) {
  DecodedAddress d;
  d.tag = line_address;
  d.channel = uint32_t(line_address & (geom.channels - 1));
  d.set_key = line_address >> geom.channel_bits();
  // Row bits sit above the bank-select field so bank and row stay independent.
  d.row_index = uint32_t((d.set_key >> geom.bank_bits()) & (geom.rows_per_bank - 1));
  return d;
}

uint64_t encode(const DecodedAddress& addr, const CacheGeometry& geom) {
  return addr.tag << geom.offset_bits();
}

}  // namespace crunchsim
