// Command-line front end: geometry and interaction-density inspection, noise
// trace dumps, gate calibration, Monte Carlo sweeps and result reporting.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "ffq/report.hpp"
#include "ffq/run_config.hpp"

namespace fs = std::filesystem;
using namespace ffq;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

RunConfig load_config(const std::string& config_path) {
  RunConfig rc;
  if (!config_path.empty()) {
    if (!fs::exists(config_path))
      throw std::runtime_error("config file not found: " + config_path);
    rc = parse_run_config(io::KeyValueFile::parse_file(config_path));
  } else {
    rc = parse_run_config(io::KeyValueFile{});
  }
  if (const char* env = std::getenv("FFQSIM_OUTPUT_DIR"); env && *env) rc.output_dir = env;
  return rc;
}

GateCalibration obtain_calibration(const RunConfig& rc, const std::string& cache_path,
                                   bool announce) {
  if (!cache_path.empty()) {
    auto cached = try_load_calibration(cache_path, rc.params, rc.settings, rc.plan.r0_m,
                                       rc.plan.dt_s);
    if (cached) {
      if (announce) std::cout << "calibration: loaded cache " << cache_path << "\n";
      return *cached;
    }
  }
  if (announce) std::cout << "calibration: running (no valid cache)\n";
  GateCalibration cal = calibrate_all(rc.params, rc.settings, rc.plan.r0_m, rc.plan.dt_s);
  if (!cache_path.empty()) {
    const auto hash =
        calibration_context_hash(rc.params, rc.settings, rc.plan.r0_m, rc.plan.dt_s);
    io::atomic_write_file(cache_path, serialize_calibration(cal, hash));
    if (announce) std::cout << "calibration: wrote cache " << cache_path << "\n";
  }
  return cal;
}

int cmd_geometry(const std::string& kind_name, double r0_nm) {
  auto geometry = build_geometry(geometry_kind_from_string(kind_name), r0_nm * 1e-9);
  std::cout << serialize_geometry(geometry).to_text();
  struct Block {
    OpKind kind;
    int parallelism;
    const char* title;
  };
  const Block blocks[] = {{OpKind::OneQubit, 1, "one_qubit_parallel_1"},
                          {OpKind::OneQubit, 2, "one_qubit_parallel_2"},
                          {OpKind::OneQubit, 3, "one_qubit_parallel_3"},
                          {OpKind::OneQubit, 4, "one_qubit_parallel_4"},
                          {OpKind::TwoQubit, 1, "two_qubit_parallel_1"},
                          {OpKind::TwoQubit, 2, "two_qubit_parallel_2"}};
  for (const auto& block : blocks) {
    auto configs = enumerate_configurations(geometry, block.kind, block.parallelism);
    std::string labels;
    for (const auto& c : configs) {
      if (!labels.empty()) labels += ", ";
      labels += c.label;
    }
    std::cout << block.title << " = " << (labels.empty() ? "none" : labels) << "\n";
  }
  return kExitOk;
}

int cmd_delta(const std::string& kind_name, double r0_nm) {
  auto geometry = build_geometry(geometry_kind_from_string(kind_name), r0_nm * 1e-9);
  const double delta = delta_metric(geometry);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", delta);
  std::cout << "delta(" << kind_name << ") = " << buf << " r0^-3\n";
  std::cout << "pair breakdown (r in r0 units, contribution r^-3):\n";
  for (const auto& p : all_pairs(geometry)) {
    const double r = p.r_m / geometry.r0_m;
    char line[128];
    std::snprintf(line, sizeof(line), "  (%d,%d)  r = %.6g  contributes %.6g", p.i + 1, p.j + 1,
                  r, 1.0 / (r * r * r));
    std::cout << line << "\n";
  }
  if (geometry.kind == GeometryKind::STA) {
    std::cout << "note: the source article quotes 3.51 r0^-3 for the star; the pair sum "
                 "3 + 3*(sqrt(3))^-3 evaluates to 3.577 r0^-3 and is reported as computed.\n";
  }
  return kExitOk;
}

int cmd_noise_sample(const RunConfig& rc, double alpha, double duration_us, double dt_ns,
                     int qubit, int instance, const std::string& out_path, bool with_psd) {
  NoiseSpec spec;
  spec.alpha = alpha;
  spec.f_min_Hz = rc.plan.f_min_Hz;
  spec.f_max_Hz = rc.plan.f_max_Hz;
  spec.n_components = rc.plan.n_components;
  spec.seed = rc.plan.master_seed;
  spec.semantics = rc.plan.alpha_semantics;
  auto trace = synthesize(spec, duration_us * 1e-6, dt_ns * 1e-9, {qubit, instance});
  std::ostringstream out;
  out << "# t_seconds dEz_V_per_m\n";
  for (size_t k = 0; k < trace.samples.size(); ++k)
    out << io::format_double(k * trace.dt_s) << " " << io::format_double(trace.samples[k])
        << "\n";
  if (out_path.empty())
    std::cout << out.str();
  else
    io::atomic_write_file(out_path, out.str());
  if (with_psd) {
    auto pg = psd_estimate(trace);
    std::ostringstream psd;
    psd << "# f_Hz power_V2m2_per_Hz\n";
    for (size_t j = 0; j < pg.freq_Hz.size(); ++j)
      psd << io::format_double(pg.freq_Hz[j]) << " " << io::format_double(pg.power[j]) << "\n";
    const std::string path = out_path.empty() ? "noise_psd.dat" : out_path + ".psd";
    io::atomic_write_file(path, psd.str());
    std::cout << "# psd written to " << path << "\n";
  }
  return kExitOk;
}

int cmd_calibrate(const RunConfig& rc, const std::string& cache_path, const std::string& gate_name,
                  const std::string& dump_dir) {
  GateCalibration cal;
  if (gate_name.empty()) {
    cal = obtain_calibration(rc, cache_path, true);
  } else {
    // restrict to one gate; cache is not written for partial calibrations
    GateId gate = gate_from_string(gate_name);
    cal.f_ref_Hz = ff_splitting(0.0, rc.params);
    cal.r0_m = rc.plan.r0_m;
    cal.dt_s = rc.plan.dt_s;
    cal.settings = rc.settings;
    auto res = calibrate(gate, rc.params, rc.settings, rc.plan.r0_m, rc.plan.dt_s);
    switch (gate) {
      case GateId::Rz: cal.rz = res; break;
      case GateId::Rx: cal.rx = res; break;
      case GateId::SqrtISwap: cal.iswap = res; break;
      default: break;
    }
  }
  auto report = [&](const CalibrationResult& res) {
    if (res.duration_s <= 0.0) return;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "%-10s duration = %10.4f ns  amplitude = %10.4g V/m  residual = %.3g",
                  to_string(res.gate).c_str(), res.duration_s * 1e9, res.amplitude,
                  res.residual_infidelity);
    std::cout << buf << "\n";
    if (res.residual_infidelity > 1e-6)
      throw std::runtime_error("calibration residual above 1e-6 for gate " + to_string(res.gate));
  };
  report(cal.rz);
  report(cal.rx);
  report(cal.iswap);
  if (!dump_dir.empty()) {
    fs::create_directories(dump_dir);
    auto geometry = build_geometry(GeometryKind::LA, rc.plan.r0_m);
    for (GateId gate : {GateId::Rz, GateId::Rx, GateId::SqrtISwap}) {
      if (!cal.calibrated(gate) || cal.result(gate).duration_s <= 0.0) continue;
      auto config = gate == GateId::SqrtISwap
                        ? make_configuration(geometry, OpKind::TwoQubit, {{0, 1}})
                        : make_configuration(geometry, OpKind::OneQubit, {{0}});
      auto sched = make_cell_schedule(config, gate, cal);
      io::atomic_write_file(fs::path(dump_dir) / ("schedule_" + to_string(gate) + ".dat"),
                            export_schedule_table(sched, sched.duration_s / 400.0));
    }
    std::cout << "schedules dumped to " << dump_dir << "\n";
  }
  return kExitOk;
}

int cmd_sweep(RunConfig rc, const std::string& cache_path, bool fast, bool keep_going,
              int workers_override) {
  if (fast && rc.profile != "fast") {
    rc.profile = "fast";
    rc.plan.n_instances = 20;
  }
  if (workers_override > 0) rc.plan.workers = workers_override;
  GateCalibration cal = obtain_calibration(rc, cache_path, true);
  std::cout << "sweep: " << rc.plan.n_instances << " instances/cell, profile " << rc.profile
            << ", output " << rc.output_dir << "\n";
  ResultTable table = run_plan(rc.plan, rc.params, cal, keep_going);
  const double summary_alpha = [&] {
    for (double a : rc.plan.alpha_grid_V_per_m)
      if (a == 50.0) return a;
    return rc.plan.alpha_grid_V_per_m.back();
  }();
  auto written = write_sweep_outputs(table, rc.plan, rc.params, rc.settings, cal, rc.output_dir,
                                     summary_alpha);
  for (const auto& f : written) std::cout << "wrote " << f << "\n";
  for (const auto& err : table.errors) std::cerr << "warning: skipped " << err << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f", table.wall_seconds);
  std::cout << "sweep finished: " << table.cells.size() << " cells in " << buf
            << " s, fingerprint " << table.fingerprint << "\n";
  return kExitOk;
}

int cmd_report(const std::string& dir, double alpha) {
  std::vector<LoadedRecord> records;
  std::vector<GeometryKind> geometries;
  for (GeometryKind g : {GeometryKind::LA, GeometryKind::SA, GeometryKind::STA}) {
    const fs::path path = fs::path(dir) / ("results_" + to_string(g) + ".csv");
    if (!fs::exists(path)) continue;
    geometries.push_back(g);
    auto part = read_results_csv(path, g);
    records.insert(records.end(), part.begin(), part.end());
  }
  if (records.empty())
    throw std::runtime_error("no results_*.csv found under " + dir);

  std::cout << "best/worst mean infidelity per (gate, geometry) at alpha = " << alpha
            << " V/m\n";
  for (GateId gate : {GateId::Rz, GateId::Rx, GateId::SqrtISwap}) {
    for (GeometryKind g : geometries) {
      std::map<int, std::pair<const LoadedRecord*, const LoadedRecord*>> by_par;
      for (const auto& rec : records) {
        if (rec.geometry != g || rec.record.gate != gate ||
            rec.record.alpha_V_per_m != alpha)
          continue;
        auto& slot = by_par[rec.parallelism];
        if (!slot.first || rec.record.mean_infidelity < slot.first->record.mean_infidelity)
          slot.first = &rec;
        if (!slot.second || rec.record.mean_infidelity > slot.second->record.mean_infidelity)
          slot.second = &rec;
      }
      for (const auto& [par, slot] : by_par) {
        char buf[200];
        std::snprintf(buf, sizeof(buf),
                      "  %-10s %-3s parallel=%d  best %.3g (%s)  worst %.3g (%s)",
                      to_string(gate).c_str(), to_string(g).c_str(), par,
                      slot.first->record.mean_infidelity,
                      slot.first->record.configuration.c_str(),
                      slot.second->record.mean_infidelity,
                      slot.second->record.configuration.c_str());
        std::cout << buf << "\n";
      }
    }
  }

  std::cout << "\nmean infidelity vs parallelism (per geometry) at alpha = " << alpha << "\n";
  for (GateId gate : {GateId::Rz, GateId::Rx, GateId::SqrtISwap}) {
    for (GeometryKind g : geometries) {
      std::map<int, std::pair<double, int>> acc;
      for (const auto& rec : records)
        if (rec.geometry == g && rec.record.gate == gate && rec.record.alpha_V_per_m == alpha) {
          acc[rec.parallelism].first += rec.record.mean_infidelity;
          acc[rec.parallelism].second += 1;
        }
      if (acc.empty()) continue;
      std::cout << "  " << to_string(gate) << " " << to_string(g) << ":";
      for (const auto& [par, slot] : acc) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "  p%d=%.3g", par, slot.first / slot.second);
        std::cout << buf;
      }
      std::cout << "\n";
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ffqsim - pulse-level simulator of parallel gating in four-qubit flip-flop arrays"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "run configuration file (key = value)");

  auto* geo = app.add_subcommand("geometry", "print an array layout and its configuration sets");
  std::string geo_kind = "LA";
  double geo_r0 = 360.0;
  geo->add_option("--geometry", geo_kind, "LA, SA or STA")->required();
  geo->add_option("--r0-nm", geo_r0, "shortest inter-qubit distance [nm]");

  auto* del = app.add_subcommand("delta", "interaction density of a geometry");
  std::string del_kind = "LA";
  double del_r0 = 360.0;
  del->add_option("--geometry", del_kind, "LA, SA or STA")->required();
  del->add_option("--r0-nm", del_r0, "shortest inter-qubit distance [nm]");

  auto* noise = app.add_subcommand("noise-sample", "synthesize and dump one noise trace");
  double ns_alpha = 50.0, ns_duration_us = 0.5, ns_dt_ns = 0.02;
  int ns_qubit = 0, ns_instance = 0;
  std::string ns_out;
  bool ns_psd = false;
  noise->add_option("--alpha", ns_alpha, "noise amplitude [V/m]");
  noise->add_option("--duration-us", ns_duration_us, "trace duration [us]");
  noise->add_option("--dt-ns", ns_dt_ns, "sample spacing [ns]");
  noise->add_option("--qubit", ns_qubit, "qubit stream index");
  noise->add_option("--instance", ns_instance, "instance stream index");
  noise->add_option("--out", ns_out, "output file (default stdout)");
  noise->add_flag("--psd", ns_psd, "also write a periodogram");

  auto* calib = app.add_subcommand("calibrate", "calibrate gate pulses and write the cache");
  std::string cal_cache = "calibration.txt", cal_gate, cal_dump;
  calib->add_option("--cache", cal_cache, "calibration cache file");
  calib->add_option("--gate", cal_gate, "restrict to one gate (rz, rx, sqrt_iswap)");
  calib->add_option("--dump-schedules", cal_dump, "directory for sampled waveform tables");

  auto* sweep = app.add_subcommand("sweep", "run the Monte Carlo sweep and write result tables");
  std::string sweep_cache = "calibration.txt";
  bool sweep_fast = false, sweep_keep = false;
  int sweep_workers = 0;
  sweep->add_option("--cache", sweep_cache, "calibration cache file");
  sweep->add_flag("--fast", sweep_fast, "fast profile (20 instances per cell)");
  sweep->add_flag("--keep-going", sweep_keep, "skip failing cells instead of aborting");
  sweep->add_option("--workers", sweep_workers, "worker thread count (0 = all cores)");

  auto* report = app.add_subcommand("report", "summarize result tables from a sweep directory");
  std::string rep_dir = "out";
  double rep_alpha = 50.0;
  report->add_option("--dir", rep_dir, "sweep output directory");
  report->add_option("--alpha", rep_alpha, "noise amplitude to tabulate [V/m]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (geo->parsed()) return cmd_geometry(geo_kind, geo_r0);
    if (del->parsed()) return cmd_delta(del_kind, del_r0);
    RunConfig rc = load_config(config_path);
    if (noise->parsed())
      return cmd_noise_sample(rc, ns_alpha, ns_duration_us, ns_dt_ns, ns_qubit, ns_instance,
                              ns_out, ns_psd);
    if (calib->parsed()) return cmd_calibrate(rc, cal_cache, cal_gate, cal_dump);
    if (sweep->parsed()) return cmd_sweep(rc, sweep_cache, sweep_fast, sweep_keep, sweep_workers);
    if (report->parsed()) return cmd_report(rep_dir, rep_alpha);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
