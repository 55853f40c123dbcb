#pragma once

#include <cstdint>

namespace crunchsim {

/// Physical organization of the stacked DRAM cache. A cache set occupies one
/// DRAM row in one bank; a slice of each row is reserved for the set's tags,
/// leaving data_ways line slots.
struct CacheGeometry {
  uint32_t channels = 4;
  uint32_t banks_per_channel = 8;
  uint32_t rows_per_bank = 2048;
  uint32_t row_bytes = 2048;
  uint32_t line_bytes = 64;
  uint32_t data_ways = 29;  // must leave >= 1 line slot per row for tags

  uint64_t total_bytes() const {
    return uint64_t(channels) * banks_per_channel * rows_per_bank * row_bytes;
  }
  uint32_t lines_per_row() const { return row_bytes / line_bytes; }
  uint32_t offset_bits() const;
  uint32_t channel_bits() const;
  uint32_t bank_bits() const;

  /// Throws std::invalid_argument if any structural invariant is violated
  /// (non-power-of-two counts, tag slice missing, zero sizes).
  void validate() const;
};

/// Address split used by every remapping scheme. `tag` keeps the full line
/// address, so tags stay unique no matter which bank a scheme picks.
struct DecodedAddress {
  uint32_t channel = 0;
  uint64_t set_key = 0;  // all address bits above line offset + channel bits
  uint32_t row_index = 0;
  uint64_t tag = 0;  // full line address (byte address >> offset_bits)
};

/// Channel bits sit directly above the line offset. Within set_key, the low
/// bits are the bank-select field consumed by the mapping schemes and the row
/// index comes from the bits directly above it, so a bank can reach every one
/// of its rows no matter which scheme routes to it. Offset bits are masked,
/// so any 64-bit input is accepted.
DecodedAddress decode(uint64_t byte_address, const CacheGeometry& geom);

/// Reconstructs the line-aligned byte address; inverse of decode.
uint64_t encode(const DecodedAddress& addr, const CacheGeometry& geom);

/// Same split starting from a line address (a stored tag).
DecodedAddress decode_line(uint64_t line_address, const CacheGeometry& geom);

}  // namespace crunchsim
