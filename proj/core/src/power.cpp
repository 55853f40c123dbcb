#include "crunchsim/power.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "crunchsim/kv.hpp"

namespace crunchsim {

namespace {

constexpr double kNjPerSecToMw = 1e-6;  // 1 nJ/s = 1e-9 W = 1e-6 mW

std::string fmt(double v) {
  char buf[64];
  snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

DramPowerParams DramPowerParams::from_kv_text(const std::string& text) {
  const auto kv = parse_kv(text);
  static const std::set<std::string> known = {
      "cache.background_mw_per_bank", "cache.refresh_mw_per_bank", "cache.activate_nj",
      "cache.read_nj",                "cache.write_nj",            "cache.banks",
      "offchip.background_mw_per_bank", "offchip.refresh_mw_per_bank",
      "offchip.activate_nj",          "offchip.read_nj",           "offchip.write_nj",
      "offchip.banks"};
  for (const auto& [key, value] : kv)
    if (!known.count(key))
      throw std::invalid_argument("power: unknown parameter key '" + key + "'");
  DramPowerParams p;
  p.background_mw_per_bank = kv_double(kv, "cache.background_mw_per_bank", p.background_mw_per_bank);
  p.refresh_mw_per_bank = kv_double(kv, "cache.refresh_mw_per_bank", p.refresh_mw_per_bank);
  p.activate_nj = kv_double(kv, "cache.activate_nj", p.activate_nj);
  p.read_nj = kv_double(kv, "cache.read_nj", p.read_nj);
  p.write_nj = kv_double(kv, "cache.write_nj", p.write_nj);
  p.cache_banks = uint32_t(kv_u64(kv, "cache.banks", p.cache_banks));
  p.offchip_background_mw_per_bank =
      kv_double(kv, "offchip.background_mw_per_bank", p.offchip_background_mw_per_bank);
  p.offchip_refresh_mw_per_bank =
      kv_double(kv, "offchip.refresh_mw_per_bank", p.offchip_refresh_mw_per_bank);
  p.offchip_activate_nj = kv_double(kv, "offchip.activate_nj", p.offchip_activate_nj);
  p.offchip_read_nj = kv_double(kv, "offchip.read_nj", p.offchip_read_nj);
  p.offchip_write_nj = kv_double(kv, "offchip.write_nj", p.offchip_write_nj);
  p.offchip_banks = uint32_t(kv_u64(kv, "offchip.banks", p.offchip_banks));
  return p;
}

DramPowerParams DramPowerParams::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("power: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_kv_text(buf.str());
}

std::string DramPowerParams::to_kv_text() const {
  std::ostringstream out;
  out << "cache.background_mw_per_bank = " << fmt(background_mw_per_bank) << '\n'
      << "cache.refresh_mw_per_bank = " << fmt(refresh_mw_per_bank) << '\n'
      << "cache.activate_nj = " << fmt(activate_nj) << '\n'
      << "cache.read_nj = " << fmt(read_nj) << '\n'
      << "cache.write_nj = " << fmt(write_nj) << '\n'
      << "cache.banks = " << cache_banks << '\n'
      << "offchip.background_mw_per_bank = " << fmt(offchip_background_mw_per_bank) << '\n'
      << "offchip.refresh_mw_per_bank = " << fmt(offchip_refresh_mw_per_bank) << '\n'
      << "offchip.activate_nj = " << fmt(offchip_activate_nj) << '\n'
      << "offchip.read_nj = " << fmt(offchip_read_nj) << '\n'
      << "offchip.write_nj = " << fmt(offchip_write_nj) << '\n'
      << "offchip.banks = " << offchip_banks << '\n';
  return out.str();
}

std::string PowerBreakdown::csv_header() {
  return "background_mw,refresh_mw,activate_mw,read_write_mw,total_mw";
}

std::string PowerBreakdown::csv_row() const {
  return fmt(background_mw) + "," + fmt(refresh_mw) + "," + fmt(activate_mw) + "," +
         fmt(read_write_mw) + "," + fmt(total_mw);
}

namespace {

PowerBreakdown component_power(double bg_per_bank, double refresh_per_bank,
                               double activate_nj, double read_nj, double write_nj,
                               uint32_t active_banks, const ActivityRates& activity) {
  if (activity.activates_per_sec < 0 || activity.reads_per_sec < 0 ||
      activity.writes_per_sec < 0)
    throw std::invalid_argument("power: negative activity rate");
  PowerBreakdown b;
  b.background_mw = bg_per_bank * active_banks;
  b.refresh_mw = refresh_per_bank * active_banks;
  b.activate_mw = activity.activates_per_sec * activate_nj * kNjPerSecToMw;
  b.read_write_mw = (activity.reads_per_sec * read_nj + activity.writes_per_sec * write_nj) *
                    kNjPerSecToMw;
  b.total_mw = b.background_mw + b.refresh_mw + b.activate_mw + b.read_write_mw;
  return b;
}

}  // namespace

PowerBreakdown cache_power(const DramPowerParams& params, uint32_t active_banks,
                           const ActivityRates& activity) {
  if (active_banks > params.cache_banks)
    throw std::invalid_argument("power: active_banks exceeds configured bank count");
  return component_power(params.background_mw_per_bank, params.refresh_mw_per_bank,
                         params.activate_nj, params.read_nj, params.write_nj, active_banks,
                         activity);
}

MemorySystemPower memory_system_power(const DramPowerParams& params,
                                      const PowerBreakdown& cache_breakdown,
                                      const ActivityRates& offchip_activity) {
  MemorySystemPower sys;
  sys.cache = cache_breakdown;
  sys.offchip = component_power(params.offchip_background_mw_per_bank,
                                params.offchip_refresh_mw_per_bank, params.offchip_activate_nj,
                                params.offchip_read_nj, params.offchip_write_nj,
                                params.offchip_banks, offchip_activity);
  sys.cache_mw = sys.cache.total_mw;
  sys.offchip_mw = sys.offchip.total_mw;
  sys.total_mw = sys.cache_mw + sys.offchip_mw;
  return sys;
}

}  // namespace crunchsim
