#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace crunchsim {

enum class Op : uint8_t { kRead = 0, kWrite = 1 };

struct TraceRecord {
  uint64_t line_address = 0;  // byte address, line-aligned after masking
  uint32_t instr_delta = 0;   // retired-instruction metadata; 0 = absent
  uint16_t app_id = 0;
  Op op = Op::kRead;

  friend bool operator==(const TraceRecord& a, const TraceRecord& b) = default;
};

enum class SyntheticKind { kUniform, kZipf, kStrided, kPhased };

SyntheticKind synthetic_kind_from_string(std::string_view name);
std::string_view to_string(SyntheticKind kind);

/// Deterministic per seed. kPhased alternates four equal phases between the
/// full footprint and a footprint/8 hot subset, both uniform.
struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::kUniform;
  uint64_t footprint_bytes = 16ull << 20;
  double zipf_alpha = 0.8;       // kZipf: p(rank) ~ rank^-alpha
  uint64_t stride_bytes = 2048;  // kStrided
  double write_fraction = 0.0;
  uint64_t length = 1'000'000;
  uint64_t seed = 1;
  uint64_t base_address = 0;
  uint32_t line_bytes = 64;
  uint32_t instr_per_request = 0;  // 0 = emit no instruction metadata
};

std::vector<TraceRecord> generate(const SyntheticSpec& spec);

/// Text: one record per line, "app,addr_hex,op,instr_delta" with op r|w.
/// Binary: 16-byte little-endian records
///   [0..7]  line_address (u64)
///   [8..11] instr_delta  (u32)
///   [12..13] app_id      (u16)
///   [14]    op           (u8: 0 read, 1 write)
///   [15]    reserved, 0
/// Both round-trip bit-exactly.
enum class TraceFormat { kText, kBinary };

std::vector<TraceRecord> read_trace(const std::string& path, TraceFormat format);
void write_trace(std::span<const TraceRecord> records, const std::string& path,
                 TraceFormat format);

}  // namespace crunchsim
