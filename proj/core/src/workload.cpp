#include "crunchsim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

namespace crunchsim {

SyntheticKind synthetic_kind_from_string(std::string_view name) {
  if (name == "uniform") return SyntheticKind::kUniform;
  if (name == "zipf") return SyntheticKind::kZipf;
  if (name == "strided") return SyntheticKind::kStrided;
  if (name == "phased") return SyntheticKind::kPhased;
  throw std::invalid_argument("unknown synthetic kind '" + std::string(name) +
                              "' (expected uniform|zipf|strided|phased)");
}

std::string_view to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::kUniform: return "uniform";
    case SyntheticKind::kZipf: return "zipf";
    case SyntheticKind::kStrided: return "strided";
    case SyntheticKind::kPhased: return "phased";
  }
  return "?";
}

namespace {

// rng-derived uniform double in [0,1); avoids distribution objects so streams
// are identical across standard library implementations.
double unit_double(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<TraceRecord> generate(const SyntheticSpec& spec) {
  if (spec.line_bytes == 0 || (spec.line_bytes & (spec.line_bytes - 1)))
    throw std::invalid_argument("synthetic: line_bytes must be a power of two");
  const uint64_t lines = spec.footprint_bytes / spec.line_bytes;
  if (lines == 0) throw std::invalid_argument("synthetic: footprint smaller than one line");
  if (spec.write_fraction < 0.0 || spec.write_fraction > 1.0)
    throw std::invalid_argument("synthetic: write_fraction must be in [0,1]");

  std::mt19937_64 rng(spec.seed);
  std::vector<TraceRecord> out;
  out.reserve(spec.length);

  // Zipf sampling: cumulative rank-frequency table, binary searched.
  std::vector<double> cdf;
  if (spec.kind == SyntheticKind::kZipf) {
    cdf.resize(lines);
    double acc = 0;
    for (uint64_t r = 0; r < lines; ++r) {
      acc += std::pow(double(r + 1), -spec.zipf_alpha);
      cdf[r] = acc;
    }
    for (auto& v : cdf) v /= acc;
  }

  const uint64_t hot_lines = std::max<uint64_t>(1, lines / 8);
  const uint64_t phase_len = std::max<uint64_t>(1, spec.length / 4);

  for (uint64_t i = 0; i < spec.length; ++i) {
    uint64_t line = 0;
    switch (spec.kind) {
      case SyntheticKind::kUniform:
        line = rng() % lines;
        break;
      case SyntheticKind::kZipf: {
        const double u = unit_double(rng);
        line = uint64_t(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        if (line >= lines) line = lines - 1;
        break;
      }
      case SyntheticKind::kStrided:
        line = (i * spec.stride_bytes / spec.line_bytes) % lines;
        break;
      case SyntheticKind::kPhased:
        line = ((i / phase_len) % 2 == 0) ? rng() % lines : rng() % hot_lines;
        break;
    }
    TraceRecord rec;
    rec.line_address = spec.base_address + line * spec.line_bytes;
    rec.op = unit_double(rng) < spec.write_fraction ? Op::kWrite : Op::kRead;
    rec.instr_delta = spec.instr_per_request;
    out.push_back(rec);
  }
  return out;
}

namespace {

constexpr size_t kBinaryRecordSize = 16;

void encode_record(const TraceRecord& rec, unsigned char* buf) {
  for (int i = 0; i < 8; ++i) buf[i] = (rec.line_address >> (8 * i)) & 0xFF;
  for (int i = 0; i < 4; ++i) buf[8 + i] = (rec.instr_delta >> (8 * i)) & 0xFF;
  buf[12] = rec.app_id & 0xFF;
  buf[13] = (rec.app_id >> 8) & 0xFF;
  buf[14] = uint8_t(rec.op);
  buf[15] = 0;
}

TraceRecord decode_record(const unsigned char* buf) {
  TraceRecord rec;
  for (int i = 0; i < 8; ++i) rec.line_address |= uint64_t(buf[i]) << (8 * i);
  for (int i = 0; i < 4; ++i) rec.instr_delta |= uint32_t(buf[8 + i]) << (8 * i);
  rec.app_id = uint16_t(buf[12]) | uint16_t(buf[13]) << 8;
  if (buf[14] > 1) throw std::invalid_argument("trace: bad op byte");
  rec.op = Op(buf[14]);
  return rec;
}

}  // namespace

std::vector<TraceRecord> read_trace(const std::string& path, TraceFormat format) {
  std::ifstream in(path, format == TraceFormat::kBinary ? std::ios::binary : std::ios::in);
  if (!in) throw std::runtime_error("trace: cannot open " + path);
  std::vector<TraceRecord> out;

  if (format == TraceFormat::kBinary) {
    unsigned char buf[kBinaryRecordSize];
    while (in.read(reinterpret_cast<char*>(buf), kBinaryRecordSize))
      out.push_back(decode_record(buf));
    if (in.gcount() != 0)
      throw std::runtime_error("trace: " + path + " has a truncated final record");
    return out;
  }

  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    unsigned app = 0;
    unsigned long long addr = 0;
    char op = 0;
    unsigned delta = 0;
    const int n = sscanf(line.c_str(), "%u,%llx,%c,%u", &app, &addr, &op, &delta);
    if (n < 3 || (op != 'r' && op != 'w') || app > 0xFFFF)
      throw std::runtime_error("trace: " + path + " line " + std::to_string(lineno) +
                               ": expected 'app,addr_hex,op,instr_delta'");
    TraceRecord rec;
    rec.app_id = uint16_t(app);
    rec.line_address = addr;
    rec.op = op == 'w' ? Op::kWrite : Op::kRead;
    rec.instr_delta = n >= 4 ? delta : 0;
    out.push_back(rec);
  }
  return out;
}

void write_trace(std::span<const TraceRecord> records, const std::string& path,
                 TraceFormat format) {
  std::ofstream out(path, format == TraceFormat::kBinary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("trace: cannot open " + path + " for writing");
  if (format == TraceFormat::kBinary) {
    unsigned char buf[kBinaryRecordSize];
    for (const TraceRecord& rec : records) {
      encode_record(rec, buf);
      out.write(reinterpret_cast<const char*>(buf), kBinaryRecordSize);
    }
    return;
  }
  char line[64];
  for (const TraceRecord& rec : records) {
    snprintf(line, sizeof(line), "%u,%llx,%c,%u\n", unsigned(rec.app_id),
             (unsigned long long)rec.line_address, rec.op == Op::kWrite ? 'w' : 'r',
             rec.instr_delta);
    out << line;
  }
}

}  // namespace crunchsim
