// Command-line front end: RRT management, steady-state and transition
// experiments, sweeps, power reports, and utility-monitor replays. Every run
// command can emit a manifest (CLI config format) that reproduces the run
// bit-identically via `crunchsim --config <manifest> <subcommand>`.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "crunchsim/analytic.hpp"
#include "crunchsim/bup.hpp"
#include "crunchsim/engine.hpp"
#include "crunchsim/kv.hpp"

using namespace crunchsim;

namespace {

struct GeometryOpts {
  uint32_t channels = 4;
  uint32_t banks = 8;
  uint32_t rows = 2048;
  uint32_t row_bytes = 2048;
  uint32_t line_bytes = 64;
  uint32_t data_ways = 29;

  CacheGeometry to_geometry() const {
    CacheGeometry g;
    g.channels = channels;
    g.banks_per_channel = banks;
    g.rows_per_bank = rows;
    g.row_bytes = row_bytes;
    g.line_bytes = line_bytes;
    g.data_ways = data_ways;
    return g;
  }
};

void add_geometry_options(CLI::App* cmd, GeometryOpts& g) {
  cmd->add_option("--channels", g.channels, "DRAM cache channels")->capture_default_str();
  cmd->add_option("--banks", g.banks, "banks per channel")->capture_default_str();
  cmd->add_option("--rows-per-bank", g.rows, "rows per bank")->capture_default_str();
  cmd->add_option("--row-bytes", g.row_bytes, "row size in bytes")->capture_default_str();
  cmd->add_option("--line-bytes", g.line_bytes, "cache line size")->capture_default_str();
  cmd->add_option("--data-ways", g.data_ways, "data lines per row")->capture_default_str();
}

struct WorkloadOpts {
  std::string trace_path;
  std::string trace_format = "text";
  std::string synthetic;
  uint64_t footprint = 16ull << 20;
  double zipf_alpha = 0.8;
  uint64_t stride = 2048;
  double write_fraction = 0.0;
  uint64_t length = 1000000;
  uint64_t gen_seed = 1;
  uint32_t instr_per_request = 0;
};

void add_workload_options(CLI::App* cmd, WorkloadOpts& w) {
  auto* trace = cmd->add_option("--trace", w.trace_path, "trace file to replay");
  cmd->add_option("--trace-format", w.trace_format, "text|binary")->capture_default_str();
  auto* synth = cmd->add_option("--synthetic", w.synthetic,
                                "generate a workload: uniform|zipf|strided|phased");
  trace->excludes(synth);
  cmd->add_option("--footprint", w.footprint, "synthetic footprint in bytes")
      ->capture_default_str();
  cmd->add_option("--zipf-alpha", w.zipf_alpha, "zipf rank exponent")->capture_default_str();
  cmd->add_option("--stride", w.stride, "strided workload stride in bytes")
      ->capture_default_str();
  cmd->add_option("--write-frac", w.write_fraction, "fraction of writes [0,1]")
      ->capture_default_str();
  cmd->add_option("--length", w.length, "synthetic request count")->capture_default_str();
  cmd->add_option("--gen-seed", w.gen_seed, "synthetic generator seed")
      ->capture_default_str()
      ->envname("CRUNCHSIM_GEN_SEED");
  cmd->add_option("--instr-per-request", w.instr_per_request,
                  "instruction metadata per generated request")
      ->capture_default_str();
}

std::vector<TraceRecord> load_workload(const WorkloadOpts& w, uint32_t line_bytes) {
  if (!w.trace_path.empty()) {
    const TraceFormat fmt =
        w.trace_format == "binary" ? TraceFormat::kBinary : TraceFormat::kText;
    if (w.trace_format != "binary" && w.trace_format != "text")
      throw std::invalid_argument("--trace-format must be text|binary");
    return read_trace(w.trace_path, fmt);
  }
  SyntheticSpec spec;
  spec.kind = synthetic_kind_from_string(w.synthetic.empty() ? "uniform" : w.synthetic);
  spec.footprint_bytes = w.footprint;
  spec.zipf_alpha = w.zipf_alpha;
  spec.stride_bytes = w.stride;
  spec.write_fraction = w.write_fraction;
  spec.length = w.length;
  spec.seed = w.gen_seed;
  spec.line_bytes = line_bytes;
  spec.instr_per_request = w.instr_per_request;
  return generate(spec);
}

struct RunOpts {
  std::string scheme = "crunch";
  std::string pattern;
  uint64_t rrt_seed = kDefaultRrtSeed;
  std::string rrt_path;
  int64_t warmup = -1;
  uint32_t issue_interval = 2;
  std::string power_params_path;
  std::string csv_path;
  std::string manifest_path;
};

void add_run_options(CLI::App* cmd, RunOpts& r, bool with_pattern = true,
                     bool with_scheme = true) {
  if (with_scheme)
    cmd->add_option("--scheme", r.scheme, "bfo|mri|crunch")
        ->capture_default_str()
        ->envname("CRUNCHSIM_SCHEME");
  if (with_pattern)
    cmd->add_option("--pattern", r.pattern,
                    "active-bank pattern, leftmost char = bank 0 (default all on)");
  cmd->add_option("--rrt-seed", r.rrt_seed, "remap table seed")
      ->capture_default_str()
      ->envname("CRUNCHSIM_RRT_SEED");
  cmd->add_option("--rrt", r.rrt_path, "load the remap table from a file");
  cmd->add_option("--warmup", r.warmup,
                  "warmup requests (-1: 15% of the trace; transitions warm on half)")
      ->capture_default_str();
  cmd->add_option("--issue-interval", r.issue_interval, "request arrival spacing in cycles")
      ->capture_default_str();
  cmd->add_option("--power-params", r.power_params_path, "power parameter key=value file");
  cmd->add_option("--csv", r.csv_path, "metrics CSV output path");
  cmd->add_option("--manifest", r.manifest_path, "write a re-runnable config manifest");
}

EngineConfig make_config(const GeometryOpts& g, const RunOpts& r) {
  EngineConfig cfg;
  cfg.geometry = g.to_geometry();
  cfg.scheme = scheme_from_string(r.scheme);
  cfg.mask = r.pattern.empty() ? ActiveBankMask::all_on(g.banks)
                               : ActiveBankMask::from_pattern(r.pattern);
  cfg.timing.issue_interval_cycles = r.issue_interval;
  if (!r.power_params_path.empty()) cfg.power = DramPowerParams::from_file(r.power_params_path);
  if (!r.rrt_path.empty()) {
    std::ifstream in(r.rrt_path);
    if (!in) throw std::runtime_error("cannot open rrt file " + r.rrt_path);
    cfg.rrt = RegionRemapTable::deserialize(in);
  } else {
    cfg.rrt = rrt_generate(g.banks, 32, r.rrt_seed);
  }
  return cfg;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty())
    std::cout << content;
  else
    write_file(path, content);
}

// Only options that were actually given: defaults are compiled in, and
// re-parsing an exhaustive dump would trip mutual-exclusion constraints.
// Runs that write a CSV always get a manifest; --manifest overrides the
// default `<csv>.manifest` path.
void maybe_write_manifest(CLI::App& app, const std::string& path,
                          const std::string& csv_path = "") {
  std::string target = path;
  if (target.empty() && !csv_path.empty()) target = csv_path + ".manifest";
  if (target.empty()) return;
  write_file(target, app.config_to_str(false, false));
}

std::vector<Scheme> parse_schemes(const std::vector<std::string>& names) {
  std::vector<Scheme> out;
  if (names.empty()) return {Scheme::kBfo, Scheme::kMri, Scheme::kCrunch};
  for (const auto& n : names) out.push_back(scheme_from_string(n));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"resizable DRAM cache simulator"};
  app.set_config("--config", "", "load options from a config file / run manifest");
  app.require_subcommand(1);
  app.fallthrough(false);

  // ---- rrt ----
  auto* rrt = app.add_subcommand("rrt", "generate, validate, or print remap tables");
  rrt->require_subcommand(1);

  struct {
    uint32_t banks = 8;
    uint32_t super_regions = 32;
    uint64_t seed = kDefaultRrtSeed;
    std::string out;
  } rrt_gen_opts;
  auto* rrt_gen = rrt->add_subcommand("gen", "generate a remap table");
  rrt_gen->add_option("--banks", rrt_gen_opts.banks)->capture_default_str();
  rrt_gen->add_option("--super-regions", rrt_gen_opts.super_regions)->capture_default_str();
  rrt_gen->add_option("--seed", rrt_gen_opts.seed)->capture_default_str()
      ->envname("CRUNCHSIM_RRT_SEED");
  rrt_gen->add_option("--out", rrt_gen_opts.out, "output path (default stdout)");

  std::string rrt_file;
  auto* rrt_check = rrt->add_subcommand("check", "validate a remap table file");
  rrt_check->add_option("file", rrt_file, "table file")->required();
  auto* rrt_show = rrt->add_subcommand("show", "print a table and its balance stats");
  rrt_show->add_option("file", rrt_file, "table file")->required();

  // ---- steady ----
  auto* steady = app.add_subcommand("steady", "steady-state run on one bank pattern");
  GeometryOpts steady_geom;
  WorkloadOpts steady_wl;
  RunOpts steady_run;
  add_geometry_options(steady, steady_geom);
  add_workload_options(steady, steady_wl);
  add_run_options(steady, steady_run);

  // ---- transition ----
  auto* transition = app.add_subcommand("transition", "power-down/up experiments");
  transition->require_subcommand(1);
  struct TransOpts {
    GeometryOpts geom;
    WorkloadOpts wl;
    RunOpts run;
    std::string before;
    std::string after;
    std::string discovery = "hier";
    std::string handling = "migrate";
    uint64_t sample_window = 10000;
    std::string series_path;
  };
  TransOpts trans_opts;
  auto add_transition_options = [&](CLI::App* cmd) {
    add_geometry_options(cmd, trans_opts.geom);
    add_workload_options(cmd, trans_opts.wl);
    add_run_options(cmd, trans_opts.run, /*with_pattern=*/false);
    cmd->add_option("--before", trans_opts.before, "bank pattern before the transition")
        ->required();
    cmd->add_option("--after", trans_opts.after, "bank pattern after the transition")
        ->required();
    cmd->add_option("--discovery", trans_opts.discovery, "full|hier")->capture_default_str();
    cmd->add_option("--handling", trans_opts.handling, "migrate|writeback")
        ->capture_default_str();
    cmd->add_option("--sample-window", trans_opts.sample_window,
                    "requests per instantaneous sample window")
        ->capture_default_str();
    cmd->add_option("--series", trans_opts.series_path, "write the sample-window CSV here");
  };
  auto* trans_down = transition->add_subcommand("down", "shut banks down");
  auto* trans_up = transition->add_subcommand("up", "bring banks back up");
  add_transition_options(trans_down);
  add_transition_options(trans_up);

  // ---- sweep ----
  auto* sweep = app.add_subcommand("sweep", "pattern / bank-count / tpmi sweeps");
  sweep->require_subcommand(1);

  struct {
    GeometryOpts geom;
    WorkloadOpts wl;
    RunOpts run;
    std::vector<std::string> schemes;
    std::vector<std::string> patterns;
    bool sequential = false;
    uint32_t jobs = 1;
  } sweep_opts;
  auto add_sweep_run_options = [&](CLI::App* cmd) {
    add_geometry_options(cmd, sweep_opts.geom);
    add_workload_options(cmd, sweep_opts.wl);
    add_run_options(cmd, sweep_opts.run, /*with_pattern=*/false, /*with_scheme=*/false);
    cmd->add_option("--scheme", sweep_opts.schemes, "schemes to sweep (default: all)")
        ->delimiter(',');
    cmd->add_option("--jobs", sweep_opts.jobs, "parallel workers")
        ->capture_default_str()
        ->envname("CRUNCHSIM_JOBS");
  };
  auto* sweep_patterns = sweep->add_subcommand("patterns", "steady metrics per pattern");
  add_sweep_run_options(sweep_patterns);
  sweep_patterns->add_option("--patterns", sweep_opts.patterns,
                             "explicit pattern list (default: all-on + balanced set)")
      ->delimiter(',');
  sweep_patterns->add_flag("--sequential", sweep_opts.sequential,
                           "use lowest-index-first shut-down patterns");
  auto* sweep_banks = sweep->add_subcommand(
      "banks", "bank-count sweep over the balanced shut-down patterns");
  add_sweep_run_options(sweep_banks);

  struct {
    std::string inputs_path;
    std::vector<double> tpmi{1, 10, 100};
    std::string csv;
    std::string manifest;
  } tpmi_opts;
  auto* sweep_tpmi = sweep->add_subcommand("tpmi", "analytic time/energy sweep");
  sweep_tpmi->add_option("--inputs", tpmi_opts.inputs_path,
                         "key=value model inputs, keys <scheme>.<field>")
      ->required();
  sweep_tpmi->add_option("--tpmi", tpmi_opts.tpmi, "tpmi values")
      ->delimiter(',')
      ->capture_default_str();
  sweep_tpmi->add_option("--csv", tpmi_opts.csv, "output CSV path");
  sweep_tpmi->add_option("--manifest", tpmi_opts.manifest, "write a re-runnable manifest");

  // ---- power ----
  auto* power = app.add_subcommand("power", "power model reports");
  struct {
    std::string metrics_path;
    std::string params_path;
    std::string out;
  } power_opts;
  auto* power_report = power->add_subcommand("report", "breakdown from a metrics file");
  power_report->add_option("--metrics", power_opts.metrics_path,
                           "key=value activity file (active_banks, cache.*_per_sec, offchip.*_per_sec)")
      ->required();
  power_report->add_option("--params", power_opts.params_path, "power parameter file");
  power_report->add_option("--out", power_opts.out, "output path (default stdout)");

  // ---- bup ----
  auto* bup = app.add_subcommand("bup", "bank utility predictor");
  struct {
    GeometryOpts geom;
    WorkloadOpts wl;
    uint64_t epoch = 1000000;
    uint64_t stride = 512;
    double miss_slack = 0.05;
    double mpki_threshold = 5.0;
    uint32_t instr_per_request_fallback = 40;
    std::string csv;
    std::string manifest;
  } bup_opts;
  auto* bup_run = bup->add_subcommand("run", "per-epoch sizing decisions for a workload");
  add_geometry_options(bup_run, bup_opts.geom);
  add_workload_options(bup_run, bup_opts.wl);
  bup_run->add_option("--epoch", bup_opts.epoch, "requests per decision epoch")
      ->capture_default_str();
  bup_run->add_option("--sampling-stride", bup_opts.stride, "set_key sampling stride")
      ->capture_default_str();
  bup_run->add_option("--miss-slack", bup_opts.miss_slack, "allowed miss increase fraction")
      ->capture_default_str();
  bup_run->add_option("--mpki-threshold", bup_opts.mpki_threshold,
                      "below this MPKI the cache shuts off")
      ->capture_default_str();
  bup_run->add_option("--instr-fallback", bup_opts.instr_per_request_fallback,
                      "instruction proxy per request when the trace has no metadata")
      ->capture_default_str();
  bup_run->add_option("--csv", bup_opts.csv, "decision log path (default stdout)");
  bup_run->add_option("--manifest", bup_opts.manifest, "write a re-runnable manifest");

  CLI11_PARSE(app, argc, argv);

  try {
    if (rrt_gen->parsed()) {
      const auto table =
          rrt_generate(rrt_gen_opts.banks, rrt_gen_opts.super_regions, rrt_gen_opts.seed);
      emit(rrt_gen_opts.out, table.serialize());
      return 0;
    }
    if (rrt_check->parsed() || rrt_show->parsed()) {
      std::ifstream in(rrt_file);
      if (!in) throw std::runtime_error("cannot open rrt file " + rrt_file);
      const auto table = RegionRemapTable::deserialize(in);
      const auto problems = table.validate();
      if (rrt_show->parsed()) {
        std::cout << table.serialize();
        std::vector<uint32_t> primaries(table.banks, 0);
        for (const auto& row : table.permutations)
          for (uint8_t b : row) primaries[b]++;
        std::cout << "# " << table.table_bytes() << " bytes, primary regions per bank:";
        for (uint32_t c : primaries) std::cout << ' ' << c;
        std::cout << '\n';
      }
      if (!problems.empty()) {
        for (const auto& p : problems) std::cerr << "rrt check: " << p << '\n';
        return 1;
      }
      if (rrt_check->parsed())
        std::cout << "ok: " << table.banks << " banks, " << table.super_regions
                  << " super-regions, " << table.table_bytes() << " bytes\n";
      return 0;
    }

    if (steady->parsed()) {
      const EngineConfig cfg = make_config(steady_geom, steady_run);
      const auto trace = load_workload(steady_wl, cfg.geometry.line_bytes);
      std::optional<uint64_t> warmup;
      if (steady_run.warmup >= 0) warmup = uint64_t(steady_run.warmup);
      const SteadyMetrics m = run_steady(trace, cfg, warmup);
      std::ostringstream csv;
      csv << SteadyMetrics::csv_header(cfg.geometry.banks_per_channel) << '\n'
          << m.csv_row(to_string(cfg.scheme), cfg.mask.to_pattern()) << '\n';
      emit(steady_run.csv_path, csv.str());
      maybe_write_manifest(app, steady_run.manifest_path, steady_run.csv_path);
      std::cerr << "steady: " << m.requests << " requests, hit_rate "
                << m.hit_rate << ", imbalance " << m.imbalance_ratio << '\n';
      return 0;
    }

    if (trans_down->parsed() || trans_up->parsed()) {
      trans_opts.run.pattern = trans_opts.before;
      const EngineConfig cfg = make_config(trans_opts.geom, trans_opts.run);
      const auto after = ActiveBankMask::from_pattern(trans_opts.after);
      if (trans_down->parsed() && !after.is_subset_of(cfg.mask))
        throw std::invalid_argument("transition down: --after must be a subset of --before");
      if (trans_up->parsed() && !cfg.mask.is_subset_of(after))
        throw std::invalid_argument("transition up: --before must be a subset of --after");
      const auto trace = load_workload(trans_opts.wl, cfg.geometry.line_bytes);
      TransitionPolicy policy;
      policy.discovery = discovery_from_string(trans_opts.discovery);
      policy.handling = handling_from_string(trans_opts.handling);
      const uint64_t warmup = trans_opts.run.warmup >= 0 ? uint64_t(trans_opts.run.warmup)
                                                         : trace.size() / 2;
      const auto exp = run_transition_experiment(trace, cfg, after, policy, warmup,
                                                 trans_opts.sample_window);
      std::ostringstream csv;
      csv << "phase," << SteadyMetrics::csv_header(cfg.geometry.banks_per_channel) << '\n'
          << "before," << exp.before.csv_row(to_string(cfg.scheme), cfg.mask.to_pattern())
          << '\n'
          << "after," << exp.after.csv_row(to_string(cfg.scheme), after.to_pattern()) << '\n'
          << '\n'
          << TransitionReport::csv_header() << '\n'
          << exp.transition.csv_row() << '\n';
      emit(trans_opts.run.csv_path, csv.str());
      if (!trans_opts.series_path.empty()) {
        std::ostringstream s;
        s << "window,end_cycle,requests,requests_per_cycle\n";
        char buf[32];
        for (const auto& w : exp.series) {
          snprintf(buf, sizeof(buf), "%.8f", w.requests_per_cycle);
          s << w.index << ',' << w.end_cycle << ',' << w.requests << ',' << buf << '\n';
        }
        write_file(trans_opts.series_path, s.str());
      }
      maybe_write_manifest(app, trans_opts.run.manifest_path, trans_opts.run.csv_path);
      std::cerr << exp.transition.to_text();
      return 0;
    }

    if (sweep_patterns->parsed() || sweep_banks->parsed()) {
      const EngineConfig cfg = make_config(sweep_opts.geom, sweep_opts.run);
      const auto trace = load_workload(sweep_opts.wl, cfg.geometry.line_bytes);
      std::vector<std::string> patterns = sweep_opts.patterns;
      if (patterns.empty()) {
        patterns.push_back(ActiveBankMask::all_on(sweep_opts.geom.banks).to_pattern());
        const auto rest = sweep_opts.sequential ? sequential_shutdown_patterns()
                                                : balanced_shutdown_patterns();
        patterns.insert(patterns.end(), rest.begin(), rest.end());
      }
      const auto schemes = parse_schemes(sweep_opts.schemes);
      const auto cells = pattern_sweep(trace, cfg, schemes, patterns, sweep_opts.jobs);
      emit(sweep_opts.run.csv_path,
           pattern_sweep_csv(cells, cfg.geometry.banks_per_channel));
      maybe_write_manifest(app, sweep_opts.run.manifest_path, sweep_opts.run.csv_path);
      return 0;
    }

    if (sweep_tpmi->parsed()) {
      const auto kv = read_kv_file(tpmi_opts.inputs_path);
      const double n_mi = kv_double(kv, "n_million_instructions", 1000.0);
      const double clock = kv_double(kv, "clock_ghz", 1.0);
      const uint32_t b = uint32_t(kv_u64(kv, "b", 4));
      std::vector<SweepInput> inputs;
      for (const char* name : {"bfo", "mri", "crunch"}) {
        const std::string prefix = std::string(name) + ".";
        if (!kv.count(prefix + "ipc_full")) continue;
        SweepInput si;
        si.scheme = name;
        si.inputs.n_million_instructions = n_mi;
        si.inputs.clock_ghz = clock;
        si.inputs.steady_banks = b;
        si.inputs.ipc_full = kv_double(kv, prefix + "ipc_full", 1.0);
        si.inputs.ipc_reduced = kv_double(kv, prefix + "ipc_reduced", 1.0);
        si.inputs.up_latency_cycles = kv_double(kv, prefix + "up_latency_cycles", 0.0);
        si.inputs.down_latency_cycles = kv_double(kv, prefix + "down_latency_cycles", 0.0);
        si.inputs.power_full_mw = kv_double(kv, prefix + "power_full_mw", 0.0);
        si.inputs.power_reduced_mw = kv_double(kv, prefix + "power_reduced_mw", 0.0);
        si.inputs.up_energy_nj = kv_double(kv, prefix + "up_energy_nj", 0.0);
        si.inputs.down_energy_nj = kv_double(kv, prefix + "down_energy_nj", 0.0);
        inputs.push_back(std::move(si));
      }
      if (inputs.empty())
        throw std::invalid_argument("tpmi inputs file defines no <scheme>.ipc_full keys");
      emit(tpmi_opts.csv, sweep_csv(tpmi_sweep(inputs, tpmi_opts.tpmi)));
      maybe_write_manifest(app, tpmi_opts.manifest, tpmi_opts.csv);
      return 0;
    }

    if (power_report->parsed()) {
      const DramPowerParams params = power_opts.params_path.empty()
                                         ? DramPowerParams{}
                                         : DramPowerParams::from_file(power_opts.params_path);
      const auto kv = read_kv_file(power_opts.metrics_path);
      const uint32_t active = uint32_t(kv_u64(kv, "active_banks", params.cache_banks));
      ActivityRates cache_rates{kv_double(kv, "cache.activates_per_sec", 0),
                                kv_double(kv, "cache.reads_per_sec", 0),
                                kv_double(kv, "cache.writes_per_sec", 0)};
      ActivityRates off_rates{kv_double(kv, "offchip.activates_per_sec", 0),
                              kv_double(kv, "offchip.reads_per_sec", 0),
                              kv_double(kv, "offchip.writes_per_sec", 0)};
      const PowerBreakdown cache_bd = cache_power(params, active, cache_rates);
      const MemorySystemPower sys = memory_system_power(params, cache_bd, off_rates);
      std::ostringstream out;
      out << "component," << PowerBreakdown::csv_header() << '\n'
          << "cache," << sys.cache.csv_row() << '\n'
          << "offchip," << sys.offchip.csv_row() << '\n';
      char buf[64];
      snprintf(buf, sizeof(buf), "%.6f", sys.total_mw);
      out << "total,,,,," << buf << '\n';
      emit(power_opts.out, out.str());
      return 0;
    }

    if (bup_run->parsed()) {
      const CacheGeometry geom = bup_opts.geom.to_geometry();
      geom.validate();
      const auto trace = load_workload(bup_opts.wl, geom.line_bytes);
      BupConfig cfg;
      cfg.sampling_stride = bup_opts.stride;
      cfg.total_banks = geom.banks_per_channel;
      UtilityMonitor monitor(cfg);
      std::ostringstream out;
      out << BupDecision::csv_header() << '\n';
      uint64_t epoch = 0;
      uint64_t epoch_requests = 0;
      uint64_t epoch_instr = 0;
      auto flush_epoch = [&]() {
        if (epoch_requests == 0) return;
        const double proxy = epoch_instr
                                 ? double(epoch_instr)
                                 : double(epoch_requests) * bup_opts.instr_per_request_fallback;
        const auto d = bup_decide(monitor, epoch_requests, proxy, bup_opts.miss_slack,
                                  bup_opts.mpki_threshold);
        out << d.csv_row(epoch) << '\n';
        monitor.reset_epoch();
        ++epoch;
        epoch_requests = 0;
        epoch_instr = 0;
      };
      for (const TraceRecord& rec : trace) {
        const DecodedAddress d = decode(rec.line_address, geom);
        monitor.observe(d.set_key, d.tag);
        ++epoch_requests;
        epoch_instr += rec.instr_delta;
        if (epoch_requests >= bup_opts.epoch) flush_epoch();
      }
      flush_epoch();
      emit(bup_opts.csv, out.str());
      maybe_write_manifest(app, bup_opts.manifest, bup_opts.csv);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "crunchsim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
