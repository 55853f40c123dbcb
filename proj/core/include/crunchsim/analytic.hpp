#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace crunchsim {

/// Inputs to the closed-form execution-time and energy model. The run retires
/// half its instructions with all banks on and half with `steady_banks` on,
/// and transitions between the two configurations `tpmi` times per million
/// instructions (the same count in each direction).
struct ModelInputs {
  double n_million_instructions = 1000.0;
  uint32_t steady_banks = 4;
  double ipc_full = 1.0;     // IPC with every bank powered
  double ipc_reduced = 1.0;  // IPC with steady_banks powered
  double up_latency_cycles = 0.0;
  double down_latency_cycles = 0.0;
  double tpmi = 0.0;
  // energy analog
  double power_full_mw = 0.0;
  double power_reduced_mw = 0.0;
  double up_energy_nj = 0.0;
  double down_energy_nj = 0.0;
  double clock_ghz = 1.0;
};

/// N/(2*IPC_full) + N/(2*IPC_reduced) + M*(T_up + T_down), with
/// M = n_million_instructions * tpmi transitions in each direction.
double execution_time_cycles(const ModelInputs& in);

/// Steady-phase cycles times phase power, plus M*(E_up + E_down).
double model_energy_nj(const ModelInputs& in);

struct SweepInput {
  std::string scheme;
  ModelInputs inputs;  // tpmi is overridden by the sweep
};

struct SweepPoint {
  std::string scheme;
  uint32_t b = 0;
  double tpmi = 0;
  double time_cycles = 0;
  double energy_nj = 0;
};

std::vector<SweepPoint> tpmi_sweep(const std::vector<SweepInput>& inputs,
                                   const std::vector<double>& tpmi_values);

/// Header: scheme,b,tpmi,time_cycles,energy_nj
std::string sweep_csv(const std::vector<SweepPoint>& points);

}  // namespace crunchsim
