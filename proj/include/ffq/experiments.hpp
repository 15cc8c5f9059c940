#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "ffq/fidelity.hpp"
#include "ffq/pulses.hpp"
#include "ffq/version.hpp"

namespace ffq {

struct ExperimentPlan {
  std::vector<GeometryKind> geometries = {GeometryKind::LA, GeometryKind::SA, GeometryKind::STA};
  std::vector<GateId> gates = {GateId::Rz, GateId::Rx, GateId::SqrtISwap};
  std::vector<int> one_qubit_parallelisms = {1, 2, 3, 4};
  std::vector<int> two_qubit_parallelisms = {1, 2};
  std::vector<double> alpha_grid_V_per_m = {0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  int n_instances = 100;
  std::uint64_t master_seed = 77;
  double r0_m = 360e-9;
  double dt_s = 10e-12;
  double f_min_Hz = 50e3;
  double f_max_Hz = 22e9;
  int n_components = 1000;
  AlphaSemantics alpha_semantics = AlphaSemantics::Rms;
  int workers = 0;  // 0 = hardware concurrency

  void validate() const {
    if (alpha_grid_V_per_m.empty()) throw std::invalid_argument("plan: empty alpha grid");
    double prev = -1.0;
    for (double a : alpha_grid_V_per_m) {
      if (a < 0.0) throw std::invalid_argument("plan: negative alpha");
      if (a < prev) throw std::invalid_argument("plan: alpha grid must be sorted");
      prev = a;
    }
    if (n_instances < 1) throw std::invalid_argument("plan: n_instances must be >= 1");
    if (geometries.empty() || gates.empty()) throw std::invalid_argument("plan: empty axes");
  }

  std::string canonical_text() const {
    std::ostringstream ss;
    ss << "geometries=";
    for (auto g : geometries) ss << to_string(g) << ";";
    ss << "|gates=";
    for (auto g : gates) ss << to_string(g) << ";";
    ss << "|par1q=";
    for (int p : one_qubit_parallelisms) ss << p << ";";
    ss << "|par2q=";
    for (int p : two_qubit_parallelisms) ss << p << ";";
    ss << "|alpha=";
    for (double a : alpha_grid_V_per_m) ss << io::format_double(a) << ";";
    ss << "|n=" << n_instances << "|seed=" << master_seed << "|r0=" << io::format_double(r0_m)
       << "|dt=" << io::format_double(dt_s) << "|fmin=" << io::format_double(f_min_Hz)
       << "|fmax=" << io::format_double(f_max_Hz) << "|K=" << n_components
       << "|sem=" << to_string(alpha_semantics);
    return ss.str();
  }
};

struct CellKey {
  GeometryKind geometry = GeometryKind::LA;
  std::string config_label;
  int parallelism = 0;
  GateId gate = GateId::Rz;
  double alpha_V_per_m = 0.0;
  int alpha_index = 0;
};

struct CellResult {
  CellKey key;
  FidelityRecord record;
};

struct ResultTable {
  std::vector<CellResult> cells;
  std::string fingerprint;
  double wall_seconds = 0.0;
  std::string plan_text;
  std::vector<std::string> errors;  // populated only when cells are skipped
};

// Seed for one (geometry, configuration, gate, alpha-index) cell; derived by
// hashing so extending a plan never changes existing cells.
inline std::uint64_t cell_seed(std::uint64_t master_seed, GeometryKind geometry,
                               const std::string& config_label, GateId gate, int alpha_index) {
  std::string key = to_string(geometry) + "|" + config_label + "|" + to_string(gate) + "|" +
                    std::to_string(alpha_index);
  return io::fnv1a64(key, master_seed ^ 0x9e3779b97f4a7c15ULL);
}

// Monte Carlo estimate for one cell: n_instances independent 4-qubit noise
// realizations of the merged schedule, each compared against the ideal
// target on the full register.
inline FidelityRecord run_cell(const ArrayGeometry& geometry, const Configuration& configuration,
                               GateId gate, double alpha_V_per_m, int n_instances,
                               std::uint64_t seed, const PhysicalParams& params,
                               const GateCalibration& cal, const ExperimentPlan& plan) {
  PulseSchedule sched = make_cell_schedule(configuration, gate, cal);
  ComplexMatrix target = target_unitary(configuration, gate);
  SystemLayout sys = layout_of(geometry);
  NoiseSpec spec;
  spec.alpha = alpha_V_per_m;
  spec.f_min_Hz = plan.f_min_Hz;
  spec.f_max_Hz = plan.f_max_Hz;
  spec.n_components = plan.n_components;
  spec.seed = seed;
  spec.semantics = plan.alpha_semantics;

  std::vector<double> fidelities(static_cast<size_t>(n_instances));
  for (int k = 0; k < n_instances; ++k) {
    std::vector<NoiseStream> streams;
    streams.reserve(kNumQubits);
    for (int q = 0; q < kNumQubits; ++q) streams.emplace_back(spec, StreamId{q, k});
    ComplexMatrix u = propagate_schedule(sys, sched, &streams, params, cal.f_ref_Hz, plan.dt_s);
    fidelities[static_cast<size_t>(k)] = entanglement_fidelity(u, target);
  }
  FidelityRecord rec = aggregate(fidelities);
  rec.configuration = configuration.label;
  rec.gate = gate;
  rec.alpha_V_per_m = alpha_V_per_m;
  return rec;
}

namespace detail {

struct CellWork {
  CellKey key;
  Configuration configuration;
  ArrayGeometry geometry;
  std::uint64_t seed = 0;
};

}  // namespace detail

inline std::string plan_fingerprint(const ExperimentPlan& plan, const PhysicalParams& params,
                                    const PulseSettings& settings) {
  std::ostringstream ss;
  ss << plan.canonical_text() << "|code=" << code_version << "|ctx="
     << calibration_context_hash(params, settings, plan.r0_m, plan.dt_s);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(io::fnv1a64(ss.str())));
  return buf;
}

// Runs every plan cell. Work items are (cell, instance) pairs dispatched to a
// thread pool; per-instance fidelities land in preallocated slots and are
// reduced in fixed order, so the table is identical for any worker count.
// With keep_going, failing cells are dropped from the table and their error
// messages recorded instead of aborting the run.
inline ResultTable run_plan(const ExperimentPlan& plan, const PhysicalParams& params,
                            const GateCalibration& cal, bool keep_going = false) {
  plan.validate();
  params.validate();
  const auto t_start = std::chrono::steady_clock::now();

  std::vector<detail::CellWork> cells;
  for (GeometryKind kind : plan.geometries) {
    ArrayGeometry geometry = build_geometry(kind, plan.r0_m);
    for (GateId gate : plan.gates) {
      const auto& levels =
          is_two_qubit(gate) ? plan.two_qubit_parallelisms : plan.one_qubit_parallelisms;
      for (int par : levels) {
        auto configs = enumerate_configurations(
            geometry, is_two_qubit(gate) ? OpKind::TwoQubit : OpKind::OneQubit, par);
        for (const auto& config : configs) {
          for (size_t ai = 0; ai < plan.alpha_grid_V_per_m.size(); ++ai) {
            detail::CellWork w;
            w.key = {kind, config.label, par, gate, plan.alpha_grid_V_per_m[ai],
                     static_cast<int>(ai)};
            w.configuration = config;
            w.geometry = geometry;
            w.seed = cell_seed(plan.master_seed, kind, config.label, gate, static_cast<int>(ai));
            cells.push_back(std::move(w));
          }
        }
      }
    }
  }

  // (cell, instance) work items.
  std::vector<std::vector<double>> fidelities(cells.size());
  for (auto& f : fidelities) f.assign(static_cast<size_t>(plan.n_instances), 0.0);
  struct Item {
    int cell;
    int instance;
  };
  std::vector<Item> items;
  items.reserve(cells.size() * static_cast<size_t>(plan.n_instances));
  for (size_t c = 0; c < cells.size(); ++c)
    for (int k = 0; k < plan.n_instances; ++k) items.push_back({static_cast<int>(c), k});

  // Shared read-only per-cell schedule/target/layout data.
  struct CellStatic {
    PulseSchedule schedule;
    ComplexMatrix target;
    SystemLayout layout;
    NoiseSpec spec;
  };
  std::vector<CellStatic> statics(cells.size());
  for (size_t c = 0; c < cells.size(); ++c) {
    const auto& w = cells[c];
    statics[c].schedule = make_cell_schedule(w.configuration,
                                             w.key.gate, cal);
    statics[c].target = target_unitary(w.configuration, w.key.gate);
    statics[c].layout = layout_of(w.geometry);
    NoiseSpec spec;
    spec.alpha = w.key.alpha_V_per_m;
    spec.f_min_Hz = plan.f_min_Hz;
    spec.f_max_Hz = plan.f_max_Hz;
    spec.n_components = plan.n_components;
    spec.seed = w.seed;
    spec.semantics = plan.alpha_semantics;
    statics[c].spec = spec;
  }

  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::vector<std::string> cell_errors(cells.size());
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const size_t idx = next.fetch_add(1);
      if (idx >= items.size()) return;
      if (!keep_going && failed.load()) return;
      const auto& item = items[idx];
      const size_t c = static_cast<size_t>(item.cell);
      const auto& st = statics[c];
      try {
        std::vector<NoiseStream> streams;
        streams.reserve(kNumQubits);
        for (int q = 0; q < kNumQubits; ++q)
          streams.emplace_back(st.spec, StreamId{q, item.instance});
        ComplexMatrix u = propagate_schedule(st.layout, st.schedule, &streams, params,
                                             cal.f_ref_Hz, plan.dt_s);
        fidelities[c][static_cast<size_t>(item.instance)] =
            entanglement_fidelity(u, st.target);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        failed.store(true);
        if (cell_errors[c].empty())
          cell_errors[c] = "cell " + to_string(cells[c].key.geometry) + "/" +
                           cells[c].key.config_label + "/" + to_string(cells[c].key.gate) +
                           " alpha=" + io::format_double(cells[c].key.alpha_V_per_m) + ": " +
                           e.what();
      }
    }
  };

  int n_workers = plan.workers > 0 ? plan.workers
                                   : static_cast<int>(std::thread::hardware_concurrency());
  if (n_workers < 1) n_workers = 1;
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failed.load() && !keep_going) {
    for (const auto& msg : cell_errors)
      if (!msg.empty()) throw std::runtime_error("run_plan: " + msg);
  }

  ResultTable table;
  table.plan_text = plan.canonical_text();
  table.fingerprint = plan_fingerprint(plan, params, cal.settings);
  for (size_t c = 0; c < cells.size(); ++c) {
    if (!cell_errors[c].empty()) {
      table.errors.push_back(cell_errors[c]);
      continue;
    }
    FidelityRecord rec = aggregate(fidelities[c]);
    rec.configuration = cells[c].key.config_label;
    rec.gate = cells[c].key.gate;
    rec.alpha_V_per_m = cells[c].key.alpha_V_per_m;
    table.cells.push_back({cells[c].key, rec});
  }
  table.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return table;
}

struct SummaryRow {
  GeometryKind geometry = GeometryKind::LA;
  GateId gate = GateId::Rz;
  int parallelism = 0;
  double mean_infidelity = 0.0;
  int n_configurations = 0;
};

// Unweighted mean over configuration representatives at one noise amplitude;
// the per-gate dashed lines of the discussion figure.
inline std::vector<SummaryRow> parallelism_summary(const ResultTable& table,
                                                   double alpha_V_per_m) {
  std::map<std::tuple<int, int, int>, std::pair<double, int>> acc;
  for (const auto& cell : table.cells) {
    if (cell.key.alpha_V_per_m != alpha_V_per_m) continue;
    auto key = std::make_tuple(static_cast<int>(cell.key.geometry),
                               static_cast<int>(cell.key.gate), cell.key.parallelism);
    auto& slot = acc[key];
    slot.first += cell.record.mean_infidelity;
    slot.second += 1;
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, slot] : acc) {
    SummaryRow row;
    row.geometry = static_cast<GeometryKind>(std::get<0>(key));
    row.gate = static_cast<GateId>(std::get<1>(key));
    row.parallelism = std::get<2>(key);
    row.mean_infidelity = slot.first / slot.second;
    row.n_configurations = slot.second;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ffq
