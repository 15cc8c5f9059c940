#pragma once

#include <set>
#include <string>

#include "ffq/experiments.hpp"
#include "ffq/io.hpp"

namespace ffq {

// Everything a sweep needs, assembled from a flat key-value config file.
// Every numeric key carries its unit as a suffix; unknown keys are rejected
// so typos fail loudly instead of silently using a default.
struct RunConfig {
  PhysicalParams params;
  PulseSettings settings;
  ExperimentPlan plan;
  std::string output_dir = "out";
  std::string profile = "full";  // full | fast
  bool settings_explicit = false;
};

inline RunConfig parse_run_config(const io::KeyValueFile& kv) {
  static const std::set<std::string> known = {
      "b0_T", "gamma_e_GHz_per_T", "gamma_n_MHz_per_T", "hyperfine_A_MHz", "donor_depth_nm",
      "tunnel_coupling_GHz", "eps_r", "g_scale",
      "rz_peak_dEz_V_per_m", "rx_eac_V_per_m", "idle_dEz_V_per_m", "ramp_fraction",
      "f_min_kHz", "f_max_GHz", "n_components", "alpha_semantics",
      "dt_ps", "r0_nm",
      "geometries", "gates", "one_qubit_parallelisms", "two_qubit_parallelisms",
      "alpha_grid_V_per_m", "n_instances", "master_seed", "workers",
      "profile", "output_dir"};
  for (const auto& [key, value] : kv.entries())
    if (!known.count(key)) throw std::runtime_error("config: unknown key '" + key + "'");

  RunConfig rc;
  auto& p = rc.params;
  p.b0_T = kv.get_double_or("b0_T", p.b0_T);
  p.gamma_e_Hz_per_T = kv.get_double_or("gamma_e_GHz_per_T", p.gamma_e_Hz_per_T / 1e9) * 1e9;
  p.gamma_n_Hz_per_T = kv.get_double_or("gamma_n_MHz_per_T", p.gamma_n_Hz_per_T / 1e6) * 1e6;
  p.a_Hz = kv.get_double_or("hyperfine_A_MHz", p.a_Hz / 1e6) * 1e6;
  p.d_m = kv.get_double_or("donor_depth_nm", p.d_m * 1e9) * 1e-9;
  p.vt_Hz = kv.get_double_or("tunnel_coupling_GHz", p.vt_Hz / 1e9) * 1e9;
  p.eps_r = kv.get_double_or("eps_r", p.eps_r);
  p.g_scale = kv.get_double_or("g_scale", p.g_scale);
  p.validate();

  rc.settings = PulseSettings::defaults_for(p);
  rc.settings_explicit = kv.has("rz_peak_dEz_V_per_m") || kv.has("rx_eac_V_per_m") ||
                         kv.has("idle_dEz_V_per_m") || kv.has("ramp_fraction");
  rc.settings.rz_peak_dEz_V_per_m =
      kv.get_double_or("rz_peak_dEz_V_per_m", rc.settings.rz_peak_dEz_V_per_m);
  rc.settings.rx_eac_V_per_m = kv.get_double_or("rx_eac_V_per_m", rc.settings.rx_eac_V_per_m);
  rc.settings.idle_dEz_V_per_m =
      kv.get_double_or("idle_dEz_V_per_m", rc.settings.idle_dEz_V_per_m);
  rc.settings.ramp_fraction = kv.get_double_or("ramp_fraction", rc.settings.ramp_fraction);
  if (!(rc.settings.ramp_fraction > 0.0 && rc.settings.ramp_fraction < 0.5))
    throw std::runtime_error("config: ramp_fraction must be in (0, 0.5)");

  auto& plan = rc.plan;
  plan.f_min_Hz = kv.get_double_or("f_min_kHz", plan.f_min_Hz / 1e3) * 1e3;
  plan.f_max_Hz = kv.get_double_or("f_max_GHz", plan.f_max_Hz / 1e9) * 1e9;
  plan.n_components = static_cast<int>(kv.get_int_or("n_components", plan.n_components));
  plan.alpha_semantics =
      alpha_semantics_from_string(kv.get_or("alpha_semantics", to_string(plan.alpha_semantics)));
  plan.dt_s = kv.get_double_or("dt_ps", plan.dt_s * 1e12) * 1e-12;
  plan.r0_m = kv.get_double_or("r0_nm", plan.r0_m * 1e9) * 1e-9;
  if (kv.has("geometries")) {
    plan.geometries.clear();
    for (const auto& s : kv.get_list("geometries"))
      plan.geometries.push_back(geometry_kind_from_string(s));
  }
  if (kv.has("gates")) {
    plan.gates.clear();
    for (const auto& s : kv.get_list("gates")) plan.gates.push_back(gate_from_string(s));
  }
  if (kv.has("one_qubit_parallelisms")) {
    plan.one_qubit_parallelisms.clear();
    for (double v : kv.get_double_list("one_qubit_parallelisms"))
      plan.one_qubit_parallelisms.push_back(static_cast<int>(v));
  }
  if (kv.has("two_qubit_parallelisms")) {
    plan.two_qubit_parallelisms.clear();
    for (double v : kv.get_double_list("two_qubit_parallelisms"))
      plan.two_qubit_parallelisms.push_back(static_cast<int>(v));
  }
  if (kv.has("alpha_grid_V_per_m")) plan.alpha_grid_V_per_m = kv.get_double_list("alpha_grid_V_per_m");
  plan.master_seed = static_cast<std::uint64_t>(kv.get_int_or("master_seed",
      static_cast<long long>(plan.master_seed)));
  plan.workers = static_cast<int>(kv.get_int_or("workers", plan.workers));

  rc.profile = kv.get_or("profile", "full");
  if (rc.profile != "full" && rc.profile != "fast")
    throw std::runtime_error("config: profile must be 'full' or 'fast'");
  const int default_n = rc.profile == "fast" ? 20 : 100;
  plan.n_instances = static_cast<int>(kv.get_int_or("n_instances", default_n));
  rc.output_dir = kv.get_or("output_dir", rc.output_dir);
  plan.validate();
  TimeGrid{0.0, 1e-9, plan.dt_s}.validate(plan.f_max_Hz);
  return rc;
}

inline std::string run_config_template() {
  return R"(# ffqsim run configuration (key = value, '#' comments)

# --- device parameters ---
b0_T = 0.4
gamma_e_GHz_per_T = 27.97
gamma_n_MHz_per_T = 17.23
hyperfine_A_MHz = 117
donor_depth_nm = 15
tunnel_coupling_GHz = 11
eps_r = 11.7
g_scale = 1000

# --- pulse settings (defaults derive from the device parameters) ---
# rz_peak_dEz_V_per_m = ...
# rx_eac_V_per_m = ...
# idle_dEz_V_per_m = ...
ramp_fraction = 0.05

# --- charge noise ---
f_min_kHz = 50
f_max_GHz = 22
n_components = 1000
alpha_semantics = rms

# --- integrator ---
dt_ps = 10

# --- sweep plan ---
r0_nm = 360
geometries = LA, SA, STA
gates = Rz, Rx, sqrt_iswap
one_qubit_parallelisms = 1, 2, 3, 4
two_qubit_parallelisms = 1, 2
alpha_grid_V_per_m = 0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100
profile = full          # full (100 instances) or fast (20)
# n_instances = 100     # explicit override of the profile default
master_seed = 77
workers = 0             # 0 = all hardware threads
output_dir = out
)";
}

}  // namespace ffq
