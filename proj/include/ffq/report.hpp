#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ffq/experiments.hpp"

namespace ffq {

// One figure-style data file per (geometry, gate): an alpha column followed
// by a mean and stderr column per configuration, configurations ordered by
// (parallelism, label).
inline std::string figure_data_text(const ResultTable& table, GeometryKind geometry,
                                    GateId gate) {
  std::vector<std::pair<int, std::string>> configs;
  std::set<double> alphas;
  for (const auto& cell : table.cells) {
    if (cell.key.geometry != geometry || cell.key.gate != gate) continue;
    alphas.insert(cell.key.alpha_V_per_m);
    std::pair<int, std::string> id{cell.key.parallelism, cell.key.config_label};
    if (std::find(configs.begin(), configs.end(), id) == configs.end()) configs.push_back(id);
  }
  if (configs.empty()) return {};
  std::sort(configs.begin(), configs.end());

  std::map<std::pair<std::string, double>, const FidelityRecord*> lookup;
  for (const auto& cell : table.cells)
    if (cell.key.geometry == geometry && cell.key.gate == gate)
      lookup[{cell.key.config_label, cell.key.alpha_V_per_m}] = &cell.record;

  std::ostringstream out;
  out << "# geometry=" << to_string(geometry) << " gate=" << to_string(gate) << "\n";
  out << "# alpha_V_per_m";
  for (const auto& [par, label] : configs)
    out << " " << label << "_mean " << label << "_err";
  out << "\n";
  for (double alpha : alphas) {
    out << io::format_double(alpha);
    for (const auto& [par, label] : configs) {
      auto it = lookup.find({label, alpha});
      if (it == lookup.end())
        out << " nan nan";
      else
        out << " " << io::format_double(it->second->mean_infidelity) << " "
            << io::format_double(it->second->std_error);
    }
    out << "\n";
  }
  return out.str();
}

// Parallelism summary file per gate: rows are parallelism levels, columns the
// per-geometry mean infidelities at the reference noise amplitude.
inline std::string summary_data_text(const ResultTable& table, GateId gate,
                                     double alpha_V_per_m) {
  auto rows = parallelism_summary(table, alpha_V_per_m);
  std::set<int> levels;
  std::map<std::pair<int, int>, double> value;
  for (const auto& row : rows) {
    if (row.gate != gate) continue;
    levels.insert(row.parallelism);
    value[{row.parallelism, static_cast<int>(row.geometry)}] = row.mean_infidelity;
  }
  if (levels.empty()) return {};
  const GeometryKind geoms[] = {GeometryKind::LA, GeometryKind::SA, GeometryKind::STA};
  std::ostringstream out;
  out << "# gate=" << to_string(gate) << " alpha_V_per_m=" << io::format_double(alpha_V_per_m)
      << "\n# n_parallel";
  for (auto g : geoms) out << " " << to_string(g) << "_mean";
  out << "\n";
  for (int level : levels) {
    out << level;
    for (auto g : geoms) {
      auto it = value.find({level, static_cast<int>(g)});
      if (it == value.end())
        out << " nan";
      else
        out << " " << io::format_double(it->second);
    }
    out << "\n";
  }
  return out.str();
}

inline std::string results_csv_text(const ResultTable& table, GeometryKind geometry) {
  std::ostringstream out;
  out << csv_header() << "\n";
  for (const auto& cell : table.cells)
    if (cell.key.geometry == geometry) out << to_csv_row(cell.record) << "\n";
  return out.str();
}

struct LoadedRecord {
  GeometryKind geometry;
  FidelityRecord record;
  int parallelism = 0;
};

inline std::vector<LoadedRecord> read_results_csv(const std::filesystem::path& path,
                                                  GeometryKind geometry) {
  std::vector<LoadedRecord> out;
  std::istringstream in(io::read_file(path));
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line != csv_header()) throw std::runtime_error(path.string() + ": unexpected header");
      continue;
    }
    LoadedRecord rec;
    rec.geometry = geometry;
    rec.record = parse_csv_row(line);
    rec.parallelism = static_cast<int>(
        parse_label(rec.record.configuration,
                    is_two_qubit(rec.record.gate) ? OpKind::TwoQubit : OpKind::OneQubit)
            .size());
    out.push_back(std::move(rec));
  }
  return out;
}

inline nlohmann::json manifest_json(const ResultTable& table, const ExperimentPlan& plan,
                                    const PhysicalParams& params, const PulseSettings& settings,
                                    const GateCalibration& cal) {
  nlohmann::json j;
  j["code_version"] = code_version;
  j["fingerprint"] = table.fingerprint;
  j["wall_seconds"] = table.wall_seconds;
  j["n_cells"] = table.cells.size();
  j["plan"]["text"] = table.plan_text;
  j["plan"]["n_instances"] = plan.n_instances;
  j["plan"]["master_seed"] = plan.master_seed;
  j["plan"]["dt_ps"] = plan.dt_s * 1e12;
  j["plan"]["r0_nm"] = plan.r0_m * 1e9;
  j["plan"]["alpha_grid_V_per_m"] = plan.alpha_grid_V_per_m;
  j["params"]["b0_T"] = params.b0_T;
  j["params"]["gamma_e_GHz_per_T"] = params.gamma_e_Hz_per_T / 1e9;
  j["params"]["gamma_n_MHz_per_T"] = params.gamma_n_Hz_per_T / 1e6;
  j["params"]["hyperfine_A_MHz"] = params.a_Hz / 1e6;
  j["params"]["donor_depth_nm"] = params.d_m * 1e9;
  j["params"]["tunnel_coupling_GHz"] = params.vt_Hz / 1e9;
  j["params"]["eps_r"] = params.eps_r;
  j["params"]["g_scale"] = params.g_scale;
  j["pulses"]["rz_peak_dEz_V_per_m"] = settings.rz_peak_dEz_V_per_m;
  j["pulses"]["rx_eac_V_per_m"] = settings.rx_eac_V_per_m;
  j["pulses"]["idle_dEz_V_per_m"] = settings.idle_dEz_V_per_m;
  j["pulses"]["ramp_fraction"] = settings.ramp_fraction;
  j["calibration"]["f_ref_Hz"] = cal.f_ref_Hz;
  j["calibration"]["rz_duration_ns"] = cal.rz.duration_s * 1e9;
  j["calibration"]["rx_duration_ns"] = cal.rx.duration_s * 1e9;
  j["calibration"]["sqrt_iswap_duration_ns"] = cal.iswap.duration_s * 1e9;
  if (!table.errors.empty()) j["cell_errors"] = table.errors;
  return j;
}

// Emits every sweep artifact under out_dir with atomic writes: per-geometry
// CSVs, per-(geometry, gate) figure data, per-gate parallelism summaries and
// the run manifest.
inline std::vector<std::string> write_sweep_outputs(const ResultTable& table,
                                                    const ExperimentPlan& plan,
                                                    const PhysicalParams& params,
                                                    const PulseSettings& settings,
                                                    const GateCalibration& cal,
                                                    const std::filesystem::path& out_dir,
                                                    double summary_alpha) {
  namespace fs = std::filesystem;
  std::vector<std::string> written;
  auto emit = [&](const fs::path& name, const std::string& content) {
    if (content.empty()) return;
    io::atomic_write_file(out_dir / name, content);
    written.push_back((out_dir / name).string());
  };
  for (GeometryKind g : plan.geometries)
    emit("results_" + to_string(g) + ".csv", results_csv_text(table, g));
  for (GeometryKind g : plan.geometries)
    for (GateId gate : plan.gates)
      emit(to_string(g) + "_" + to_string(gate) + ".dat", figure_data_text(table, g, gate));
  for (GateId gate : plan.gates)
    emit("parallelism_" + to_string(gate) + ".dat", summary_data_text(table, gate, summary_alpha));
  emit("manifest.json", manifest_json(table, plan, params, settings, cal).dump(2) + "\n");
  return written;
}

}  // namespace ffq
