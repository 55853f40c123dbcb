#pragma once

#include <cstdint>
#include <string>

namespace crunchsim {

struct ActivityRates {
  double activates_per_sec = 0;
  double reads_per_sec = 0;
  double writes_per_sec = 0;
};

/// Calculator-style power model: static power (background + refresh) scales
/// linearly with powered banks, dynamic power is per-event energy times rate.
/// The stacked part drives one chip per access, so its activate energy is a
/// fraction of the off-chip part's; the refresh constant already includes the
/// doubled refresh rate of the hot stacked die. All values are configuration,
/// not datasheet ground truth.
struct DramPowerParams {
  // stacked cache
  double background_mw_per_bank = 10.0;
  double refresh_mw_per_bank = 2.0;
  double activate_nj = 1.0;
  double read_nj = 4.0;
  double write_nj = 4.0;
  uint32_t cache_banks = 32;  // 4 channels x 8 banks

  // off-chip DRAM (always fully powered)
  double offchip_background_mw_per_bank = 12.0;
  double offchip_refresh_mw_per_bank = 1.2;
  double offchip_activate_nj = 8.0;  // eight chips activate per command
  double offchip_read_nj = 4.0;
  double offchip_write_nj = 4.0;
  uint32_t offchip_banks = 16;  // 2 channels x 8 banks

  static DramPowerParams from_kv_text(const std::string& text);
  static DramPowerParams from_file(const std::string& path);
  std::string to_kv_text() const;
};

struct PowerBreakdown {
  double background_mw = 0;
  double refresh_mw = 0;
  double activate_mw = 0;
  double read_write_mw = 0;
  double total_mw = 0;

  static std::string csv_header();
  std::string csv_row() const;
};

/// Throws std::invalid_argument on negative rates or active_banks above the
/// configured bank count.
PowerBreakdown cache_power(const DramPowerParams& params, uint32_t active_banks,
                           const ActivityRates& activity);

struct MemorySystemPower {
  PowerBreakdown cache;
  PowerBreakdown offchip;
  double cache_mw = 0;
  double offchip_mw = 0;
  double total_mw = 0;
};

MemorySystemPower memory_system_power(const DramPowerParams& params,
                                      const PowerBreakdown& cache_breakdown,
                                      const ActivityRates& offchip_activity);

}  // namespace crunchsim
