#include "crunchsim/analytic.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace crunchsim {

namespace {

void check(const ModelInputs& in) {
  if (in.ipc_full <= 0 || in.ipc_reduced <= 0)
    throw std::invalid_argument("analytic: IPC values must be positive");
  if (in.tpmi < 0) throw std::invalid_argument("analytic: tpmi must be >= 0");
  if (in.clock_ghz <= 0) throw std::invalid_argument("analytic: clock must be positive");
}

}  // namespace

double execution_time_cycles(const ModelInputs& in) {
  check(in);
  const double n = in.n_million_instructions * 1e6;
  const double transitions = in.n_million_instructions * in.tpmi;  // per direction
  return n / (2.0 * in.ipc_full) + n / (2.0 * in.ipc_reduced) +
         transitions * (in.up_latency_cycles + in.down_latency_cycles);
}

double model_energy_nj(const ModelInputs& in) {
  check(in);
  const double n = in.n_million_instructions * 1e6;
  const double transitions = in.n_million_instructions * in.tpmi;
  const double ns_full = n / (2.0 * in.ipc_full) / in.clock_ghz;
  const double ns_reduced = n / (2.0 * in.ipc_reduced) / in.clock_ghz;
  // mW * ns = pJ
  const double steady_nj = (ns_full * in.power_full_mw + ns_reduced * in.power_reduced_mw) * 1e-3;
  return steady_nj + transitions * (in.up_energy_nj + in.down_energy_nj);
}

std::vector<SweepPoint> tpmi_sweep(const std::vector<SweepInput>& inputs,
                                   const std::vector<double>& tpmi_values) {
  std::vector<SweepPoint> out;
  out.reserve(inputs.size() * tpmi_values.size());
  for (const SweepInput& si : inputs) {
    ModelInputs in = si.inputs;
    for (double tpmi : tpmi_values) {
      in.tpmi = tpmi;
      SweepPoint p;
      p.scheme = si.scheme;
      p.b = in.steady_banks;
      p.tpmi = tpmi;
      p.time_cycles = execution_time_cycles(in);
      p.energy_nj = model_energy_nj(in);
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::ostringstream out;
  out << "scheme,b,tpmi,time_cycles,energy_nj\n";
  char buf[128];
  for (const SweepPoint& p : points) {
    snprintf(buf, sizeof(buf), "%s,%u,%.6f,%.6f,%.6f", p.scheme.c_str(), p.b, p.tpmi,
             p.time_cycles, p.energy_nj);
    out << buf << '\n';
  }
  return out.str();
}

}  // namespace crunchsim
