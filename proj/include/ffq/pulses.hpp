#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ffq/configuration.hpp"
#include "ffq/fidelity.hpp"
#include "ffq/gates.hpp"
#include "ffq/noise.hpp"
#include "ffq/propagation.hpp"

namespace ffq {

// Free pulse parameters fed into calibration. Idle parking and the Rz
// excursion depth are expressed as fields; defaults scale with the tunnel
// coupling so they stay in the intended regime when params are overridden.
struct PulseSettings {
  double rz_peak_dEz_V_per_m = 0.0;
  double rx_eac_V_per_m = 0.0;
  double idle_dEz_V_per_m = 0.0;
  double ramp_fraction = 0.05;

  static PulseSettings defaults_for(const PhysicalParams& p) {
    PulseSettings s;
    const double per_vt = p.vt_Hz / p.orbital_rate();  // field giving eps_o = Vt
    s.rz_peak_dEz_V_per_m = 1.38 * per_vt;
    // Parked just beyond the Rz excursion peak: detuned and exchange-quenched
    // relative to operated qubits while the excursion path never crosses it.
    s.idle_dEz_V_per_m = 1.42 * per_vt;
    // Drive amplitude targeting a fixed Rabi rate at the sweet spot.
    const double omega_target_Hz = 20e6;
    s.rx_eac_V_per_m = 4.0 * omega_target_Hz * p.vt_Hz / (p.a_Hz * p.orbital_rate());
    return s;
  }
};

// One flat-top excursion with raised-cosine ramps on each side.
struct FlatTopSegment {
  double t0_s = 0.0;
  double t1_s = 0.0;
  double level = 0.0;
};

inline double flat_top_envelope(double tau_s, double length_s, double ramp_fraction) {
  if (tau_s <= 0.0 || tau_s >= length_s) return 0.0;
  const double ramp = ramp_fraction * length_s;
  if (ramp > 0.0 && tau_s < ramp)
    return 0.5 * (1.0 - std::cos(constants::pi * tau_s / ramp));
  if (ramp > 0.0 && tau_s > length_s - ramp)
    return 0.5 * (1.0 - std::cos(constants::pi * (length_s - tau_s) / ramp));
  return 1.0;
}

struct QubitChannel {
  double rest_dEz_V_per_m = 0.0;
  std::vector<FlatTopSegment> dc;  // non-overlapping excursions from rest
  std::vector<FlatTopSegment> ac;  // drive envelope bursts (from zero)
  double f_drive_Hz = 0.0;
  double phase_rad = 0.0;
  // Virtual-z frame bookkeeping applied around the raw propagator.
  double vz_pre_rad = 0.0;
  double vz_post_rad = 0.0;
  // Intervals whose deterministic single-qubit phase is unwound (parked and
  // padded stretches; never the stretch that realizes the gate itself).
  std::vector<std::pair<double, double>> unwind;

  double dEz_at(double t) const {
    double v = rest_dEz_V_per_m;
    for (const auto& s : dc)
      v += (s.level - rest_dEz_V_per_m) *
           flat_top_envelope(t - s.t0_s, s.t1_s - s.t0_s, ramp_fraction_);
    return v;
  }

  double eac_at(double t) const {
    double v = 0.0;
    for (const auto& s : ac)
      v += s.level * flat_top_envelope(t - s.t0_s, s.t1_s - s.t0_s, ramp_fraction_);
    return v;
  }

  bool in_unwind(double t) const {
    for (const auto& [a, b] : unwind)
      if (t > a && t < b) return true;
    return false;
  }

  double ramp_fraction_ = 0.05;
};

struct PulseSchedule {
  GateId gate = GateId::Idle;
  double duration_s = 0.0;
  std::vector<QubitChannel> channels;

  int n_qubits() const { return static_cast<int>(channels.size()); }

  void validate() const {
    if (gate != GateId::Idle && !(duration_s > 0.0))
      throw std::invalid_argument("schedule: duration must be positive");
    if (duration_s < 0.0) throw std::invalid_argument("schedule: negative duration");
  }

  bool has_drive() const {
    for (const auto& ch : channels)
      if (!ch.ac.empty()) return true;
    return false;
  }
};

struct CalibrationResult {
  GateId gate = GateId::Idle;
  double duration_s = 0.0;
  double amplitude = 0.0;  // peak dEz for Rz, Eac for Rx, unused for sqrt_iswap
  double residual_infidelity = 0.0;
  double f_ref_Hz = 0.0;
};

struct GateCalibration {
  double f_ref_Hz = 0.0;
  double r0_m = 0.0;
  double dt_s = 0.0;
  PulseSettings settings;
  CalibrationResult rz, rx, iswap;

  const CalibrationResult& result(GateId g) const {
    switch (g) {
      case GateId::Rz: return rz;
      case GateId::Rx: return rx;
      case GateId::SqrtISwap: return iswap;
      default: break;
    }
    throw std::invalid_argument("no calibration for gate " + to_string(g));
  }

  bool calibrated(GateId g) const {
    if (g == GateId::Idle) return true;
    return result(g).duration_s > 0.0;
  }
};

// Reduced interacting system; the 4-qubit array maps onto it via pair_list,
// calibration uses 1- and 2-qubit instances.
struct SystemLayout {
  int n_qubits = kNumQubits;
  std::vector<QubitPair> pairs;
};

inline SystemLayout layout_of(const ArrayGeometry& g) { return {kNumQubits, pair_list(g)}; }

namespace detail {

inline void add_rz_channel(QubitChannel& ch, double t0, double duration, double peak,
                           double ramp_fraction) {
  ch.ramp_fraction_ = ramp_fraction;
  ch.dc.push_back({t0, t0 + duration, peak});
}

inline void add_rx_channel(QubitChannel& ch, double t0, double duration, double eac,
                           double f_ref, double ramp_fraction) {
  ch.ramp_fraction_ = ramp_fraction;
  ch.ac.push_back({t0, t0 + duration, eac});
  ch.f_drive_Hz = f_ref;
  // Phase pi turns the positive drive area into a -pi/2 rotation about x.
  ch.phase_rad = constants::pi;
}

}  // namespace detail

// Schedule for one configuration cell: every operated target runs the gate
// starting at t = 0, idle qubits park at the idle bias with their frame
// phase unwound.
inline PulseSchedule make_cell_schedule(const Configuration& configuration, GateId gate,
                                        const GateCalibration& cal) {
  if (gate == GateId::Idle) throw std::invalid_argument("cell schedule needs a real gate");
  if (!cal.calibrated(gate))
    throw std::invalid_argument("uncalibrated gate requested: " + to_string(gate));
  const bool two_qubit = is_two_qubit(gate);
  if ((configuration.op_kind == OpKind::TwoQubit) != two_qubit)
    throw std::invalid_argument("configuration/gate kind mismatch");
  const CalibrationResult& res = cal.result(gate);

  PulseSchedule sched;
  sched.gate = gate;
  sched.duration_s = res.duration_s;
  sched.channels.resize(kNumQubits);
  for (auto& ch : sched.channels) ch.ramp_fraction_ = cal.settings.ramp_fraction;

  for (const auto& targets : configuration.operated) {
    switch (gate) {
      case GateId::Rz:
        detail::add_rz_channel(sched.channels[targets[0]], 0.0, res.duration_s, res.amplitude,
                               cal.settings.ramp_fraction);
        break;
      case GateId::Rx:
        detail::add_rx_channel(sched.channels[targets[0]], 0.0, res.duration_s, res.amplitude,
                               cal.f_ref_Hz, cal.settings.ramp_fraction);
        break;
      case GateId::SqrtISwap:
        // Both qubits rest at the interaction point; the exchange rotation is
        // mapped onto the +i convention by a sigma_z conjugation (virtual z)
        // on the first pair member.
        sched.channels[targets[0]].vz_pre_rad += -constants::pi;
        sched.channels[targets[0]].vz_post_rad += constants::pi;
        break;
      default: break;
    }
  }
  for (int q : configuration.idle) {
    sched.channels[q].rest_dEz_V_per_m = cal.settings.idle_dEz_V_per_m;
    sched.channels[q].unwind.push_back({0.0, res.duration_s});
  }
  return sched;
}

// Appends a stretch where every qubit sits at the idle bias with no drive;
// the stretch's deterministic phase is unwound, so isolated-qubit fidelity is
// unaffected.
inline void pad_with_idle(PulseSchedule& sched, double extra_s, const PulseSettings& settings) {
  if (!(extra_s > 0.0)) return;
  const double t0 = sched.duration_s;
  const double t1 = t0 + extra_s;
  for (auto& ch : sched.channels) {
    if (ch.rest_dEz_V_per_m != settings.idle_dEz_V_per_m)
      ch.dc.push_back({t0, t1, settings.idle_dEz_V_per_m});
    ch.unwind.push_back({t0, t1});
  }
  sched.duration_s = t1;
}

// Diagonal of the per-qubit virtual-z product exp(+i angle_q sigma_z / 2).
inline ComplexMatrix z_rotation_diagonal(int n_qubits, const std::vector<double>& angles) {
  const int dim = 1 << n_qubits;
  ComplexMatrix d = ComplexMatrix::Zero(dim, dim);
  for (int b = 0; b < dim; ++b) {
    double phase = 0.0;
    for (int q = 0; q < n_qubits; ++q) {
      const bool excited = (b >> qubit_bit(n_qubits, q)) & 1;
      phase += 0.5 * angles[static_cast<size_t>(q)] * (excited ? -1.0 : 1.0);
    }
    d(b, b) = std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return d;
}

// Builder evaluating channels plus optional per-qubit noise at grid midpoints.
inline HamiltonianBuilder make_builder(const SystemLayout& sys, const PulseSchedule& sched,
                                       const std::vector<NoiseStream>* streams,
                                       const PhysicalParams& params, double f_ref_Hz,
                                       const TimeGrid& grid) {
  if (static_cast<int>(sched.channels.size()) != sys.n_qubits)
    throw std::invalid_argument("schedule/system qubit count mismatch");
  if (streams && static_cast<int>(streams->size()) != sys.n_qubits)
    throw std::invalid_argument("need one noise stream per qubit");
  const int n = grid.n_steps();
  const double dt = (grid.t1_s - grid.t0_s) / n;
  auto noise = std::make_shared<std::vector<std::vector<double>>>();
  if (streams) {
    noise->reserve(streams->size());
    for (const auto& s : *streams)
      noise->push_back(s.sample_series(grid.t0_s + 0.5 * dt, dt, n));
  }
  auto delta = std::make_shared<std::vector<double>>(sys.n_qubits);
  auto omega = std::make_shared<std::vector<double>>(sys.n_qubits);
  auto phase = std::make_shared<std::vector<double>>(sys.n_qubits);
  auto dez = std::make_shared<std::vector<double>>(sys.n_qubits);
  auto couplings = std::make_shared<std::vector<CouplingTerm>>();
  SystemLayout layout = sys;
  PulseSchedule schedule = sched;
  double t0 = grid.t0_s;
  return [=](double t, ComplexMatrix& h) {
    const int k = static_cast<int>(std::lround((t - t0) / dt - 0.5));
    for (int q = 0; q < layout.n_qubits; ++q) {
      const auto& ch = schedule.channels[static_cast<size_t>(q)];
      double dEz = ch.dEz_at(t);
      if (!noise->empty() && k >= 0 && k < static_cast<int>((*noise)[static_cast<size_t>(q)].size()))
        dEz += (*noise)[static_cast<size_t>(q)][static_cast<size_t>(k)];
      (*dez)[static_cast<size_t>(q)] = dEz;
      (*delta)[static_cast<size_t>(q)] = ff_splitting(dEz, params) - f_ref_Hz;
      (*omega)[static_cast<size_t>(q)] = rabi_rate(dEz, ch.eac_at(t), params);
      (*phase)[static_cast<size_t>(q)] = ch.phase_rad;
    }
    couplings->clear();
    for (const auto& pr : layout.pairs)
      couplings->push_back(
          {pr.i, pr.j,
           dipole_coupling((*dez)[static_cast<size_t>(pr.i)], (*dez)[static_cast<size_t>(pr.j)],
                           pr.r_m, params)});
    assemble_matrix_into(h, layout.n_qubits, *delta, *omega, *phase, *couplings);
  };
}

// Deterministic parked-phase angles for the unwind intervals, accumulated on
// exactly the propagation midpoints so padding cancels to round-off.
inline std::vector<double> unwind_angles(const SystemLayout& sys, const PulseSchedule& sched,
                                         const PhysicalParams& params, double f_ref_Hz,
                                         const TimeGrid& grid) {
  const int n = grid.n_steps();
  const double dt = (grid.t1_s - grid.t0_s) / n;
  std::vector<double> angles(static_cast<size_t>(sys.n_qubits), 0.0);
  for (int q = 0; q < sys.n_qubits; ++q) {
    const auto& ch = sched.channels[static_cast<size_t>(q)];
    if (ch.unwind.empty()) continue;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
      const double t = grid.t0_s + (k + 0.5) * dt;
      if (ch.in_unwind(t)) acc += (ff_splitting(ch.dEz_at(t), params) - f_ref_Hz) * dt;
    }
    angles[static_cast<size_t>(q)] = constants::two_pi * acc;
  }
  return angles;
}

// Full evolution of a schedule plus one noise realization per qubit; virtual
// z corrections (gate intent and parked-phase unwind) are applied around the
// raw time-ordered product.
inline ComplexMatrix propagate_schedule(const SystemLayout& sys, const PulseSchedule& sched,
                                        const std::vector<NoiseStream>* streams,
                                        const PhysicalParams& params, double f_ref_Hz,
                                        double dt_s, double* defect_out = nullptr) {
  sched.validate();
  TimeGrid grid{0.0, sched.duration_s, dt_s};
  if (streams && !streams->empty()) grid.validate((*streams)[0].spec().f_max_Hz);
  auto builder = make_builder(sys, sched, streams, params, f_ref_Hz, grid);
  ComplexMatrix u =
      propagate_hamiltonian(sys.n_qubits, grid, builder, !sched.has_drive(), defect_out);
  std::vector<double> pre(static_cast<size_t>(sys.n_qubits), 0.0);
  std::vector<double> post = unwind_angles(sys, sched, params, f_ref_Hz, grid);
  bool any = false;
  for (int q = 0; q < sys.n_qubits; ++q) {
    const auto& ch = sched.channels[static_cast<size_t>(q)];
    pre[static_cast<size_t>(q)] = ch.vz_pre_rad;
    post[static_cast<size_t>(q)] += ch.vz_post_rad;
    if (pre[static_cast<size_t>(q)] != 0.0 || post[static_cast<size_t>(q)] != 0.0) any = true;
  }
  if (any)
    u = z_rotation_diagonal(sys.n_qubits, post) * u * z_rotation_diagonal(sys.n_qubits, pre);
  return u;
}

namespace detail {

// Deterministic bracketing plus golden-section minimization.
inline double golden_minimize(const std::function<double(double)>& f, double seed,
                              double rel_tol, const char* what) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  std::vector<double> factors;
  for (int k = 0; k <= 24; ++k) factors.push_back(0.5 * std::pow(2.0 / 0.5, k / 24.0));
  double best_x = 0.0, best_f = std::numeric_limits<double>::infinity();
  int best_k = -1;
  std::vector<double> values(factors.size());
  for (size_t k = 0; k < factors.size(); ++k) {
    values[k] = f(seed * factors[k]);
    if (values[k] < best_f) {
      best_f = values[k];
      best_x = seed * factors[k];
      best_k = static_cast<int>(k);
    }
  }
  if (best_k <= 0 || best_k + 1 >= static_cast<int>(factors.size()))
    throw std::runtime_error(std::string("calibrate: failed to bracket a minimum for ") + what);
  double a = seed * factors[static_cast<size_t>(best_k - 1)];
  double b = seed * factors[static_cast<size_t>(best_k + 1)];
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while ((b - a) > rel_tol * best_x) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

// Zero-noise tuning of the gate's free duration on an isolated qubit (or
// isolated r0 pair), pinning the reference frame frequency.
inline CalibrationResult calibrate(GateId gate, const PhysicalParams& params,
                                   const PulseSettings& settings, double r0_m, double dt_s) {
  params.validate();
  const double f_ref = ff_splitting(0.0, params);
  CalibrationResult out;
  out.gate = gate;
  out.f_ref_Hz = f_ref;
  if (gate == GateId::Idle) return out;

  SystemLayout sys;
  PulseSchedule proto;
  ComplexMatrix target;
  double seed_duration = 0.0;

  switch (gate) {
    case GateId::Rz: {
      sys = {1, {}};
      const double plateau_rate = f_ref - ff_splitting(settings.rz_peak_dEz_V_per_m, params);
      if (!(plateau_rate > 0.0))
        throw std::runtime_error("calibrate: Rz excursion produces no phase accumulation");
      seed_duration = 0.25 / (plateau_rate * (1.0 - settings.ramp_fraction));
      out.amplitude = settings.rz_peak_dEz_V_per_m;
      target = ideal_gate_matrix(GateId::Rz);
      break;
    }
    case GateId::Rx: {
      sys = {1, {}};
      const double omega = rabi_rate(0.0, settings.rx_eac_V_per_m, params);
      if (!(omega > 0.0)) throw std::runtime_error("calibrate: zero Rabi rate");
      seed_duration = 0.25 / (omega * (1.0 - settings.ramp_fraction));
      out.amplitude = settings.rx_eac_V_per_m;
      target = ideal_gate_matrix(GateId::Rx);
      break;
    }
    case GateId::SqrtISwap: {
      sys = {2, {{0, 1, r0_m}}};
      const double g = dipole_coupling(0.0, 0.0, r0_m, params);
      if (!(g > 0.0)) throw std::runtime_error("calibrate: zero exchange coupling");
      seed_duration = 1.0 / (8.0 * g);
      target = ideal_gate_matrix(GateId::SqrtISwap);
      break;
    }
    default: throw std::invalid_argument("calibrate: bad gate");
  }

  auto objective = [&](double duration) {
    PulseSchedule sched;
    sched.gate = gate;
    sched.duration_s = duration;
    sched.channels.resize(static_cast<size_t>(sys.n_qubits));
    for (auto& ch : sched.channels) ch.ramp_fraction_ = settings.ramp_fraction;
    switch (gate) {
      case GateId::Rz:
        detail::add_rz_channel(sched.channels[0], 0.0, duration, settings.rz_peak_dEz_V_per_m,
                               settings.ramp_fraction);
        break;
      case GateId::Rx:
        detail::add_rx_channel(sched.channels[0], 0.0, duration, settings.rx_eac_V_per_m, f_ref,
                               settings.ramp_fraction);
        break;
      case GateId::SqrtISwap:
        sched.channels[0].vz_pre_rad = -constants::pi;
        sched.channels[0].vz_post_rad = constants::pi;
        break;
      default: break;
    }
    ComplexMatrix u = propagate_schedule(sys, sched, nullptr, params, f_ref, dt_s);
    return 1.0 - entanglement_fidelity(u, target);
  };

  out.duration_s = detail::golden_minimize(objective, seed_duration, 1e-10, to_string(gate).c_str());
  out.residual_infidelity = objective(out.duration_s);
  return out;
}

inline GateCalibration calibrate_all(const PhysicalParams& params, const PulseSettings& settings,
                                     double r0_m, double dt_s) {
  GateCalibration cal;
  cal.f_ref_Hz = ff_splitting(0.0, params);
  cal.r0_m = r0_m;
  cal.dt_s = dt_s;
  cal.settings = settings;
  cal.rz = calibrate(GateId::Rz, params, settings, r0_m, dt_s);
  cal.rx = calibrate(GateId::Rx, params, settings, r0_m, dt_s);
  cal.iswap = calibrate(GateId::SqrtISwap, params, settings, r0_m, dt_s);
  return cal;
}

// Everything the calibration depends on, hashed into the cache header so a
// stale or foreign cache triggers recalibration instead of silent reuse.
inline std::uint64_t calibration_context_hash(const PhysicalParams& p,
                                              const PulseSettings& s, double r0_m,
                                              double dt_s) {
  std::ostringstream ss;
  ss.precision(17);
  ss << p.b0_T << '|' << p.gamma_e_Hz_per_T << '|' << p.gamma_n_Hz_per_T << '|' << p.a_Hz << '|'
     << p.d_m << '|' << p.vt_Hz << '|' << p.eps_r << '|' << p.g_scale << '|'
     << s.rz_peak_dEz_V_per_m << '|' << s.rx_eac_V_per_m << '|' << s.idle_dEz_V_per_m << '|'
     << s.ramp_fraction << '|' << r0_m << '|' << dt_s;
  return io::fnv1a64(ss.str());
}

inline std::string serialize_calibration(const GateCalibration& cal, std::uint64_t context_hash) {
  io::KeyValueFile kv;
  kv.set("format", "ffqsim-calibration-v1");
  kv.set("context_hash", std::to_string(context_hash));
  kv.set("f_ref_Hz", io::format_double(cal.f_ref_Hz));
  kv.set("r0_m", io::format_double(cal.r0_m));
  kv.set("dt_s", io::format_double(cal.dt_s));
  auto put = [&](const char* prefix, const CalibrationResult& r) {
    kv.set(std::string(prefix) + "_duration_s", io::format_double(r.duration_s));
    kv.set(std::string(prefix) + "_amplitude", io::format_double(r.amplitude));
    kv.set(std::string(prefix) + "_residual", io::format_double(r.residual_infidelity));
  };
  put("rz", cal.rz);
  put("rx", cal.rx);
  put("sqrt_iswap", cal.iswap);
  return kv.to_text();
}

// Returns nullopt when the file is missing, malformed, or was produced under
// different parameters; callers recalibrate in that case.
inline std::optional<GateCalibration> try_load_calibration(const std::string& path,
                                                           const PhysicalParams& params,
                                                           const PulseSettings& settings,
                                                           double r0_m, double dt_s) {
  io::KeyValueFile kv;
  try {
    kv = io::KeyValueFile::parse_file(path);
    if (kv.get_or("format", "") != "ffqsim-calibration-v1") return std::nullopt;
    const auto expect = calibration_context_hash(params, settings, r0_m, dt_s);
    if (kv.get("context_hash") != std::to_string(expect)) return std::nullopt;
    GateCalibration cal;
    cal.f_ref_Hz = kv.get_double("f_ref_Hz");
    cal.r0_m = kv.get_double("r0_m");
    cal.dt_s = kv.get_double("dt_s");
    cal.settings = settings;
    auto get = [&](const char* prefix, GateId gate) {
      CalibrationResult r;
      r.gate = gate;
      r.f_ref_Hz = cal.f_ref_Hz;
      r.duration_s = kv.get_double(std::string(prefix) + "_duration_s");
      r.amplitude = kv.get_double(std::string(prefix) + "_amplitude");
      r.residual_infidelity = kv.get_double(std::string(prefix) + "_residual");
      return r;
    };
    cal.rz = get("rz", GateId::Rz);
    cal.rx = get("rx", GateId::Rx);
    cal.iswap = get("sqrt_iswap", GateId::SqrtISwap);
    return cal;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// Channel waveforms sampled at a caller-chosen rate: one time column, then a
// dEz and Eac column per qubit.
inline std::string export_schedule_table(const PulseSchedule& sched, double sample_dt_s) {
  std::ostringstream out;
  out << "# t_s";
  for (int q = 0; q < sched.n_qubits(); ++q)
    out << " dEz_q" << (q + 1) << "_V_per_m eac_q" << (q + 1) << "_V_per_m";
  out << "\n";
  const int n = std::max(2, static_cast<int>(std::floor(sched.duration_s / sample_dt_s)) + 1);
  for (int k = 0; k < n; ++k) {
    const double t = k * sample_dt_s;
    out << io::format_double(t);
    for (const auto& ch : sched.channels)
      out << " " << io::format_double(ch.dEz_at(t)) << " " << io::format_double(ch.eac_at(t));
    out << "\n";
  }
  return out.str();
}

}  // namespace ffq
