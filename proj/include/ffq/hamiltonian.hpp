#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ffq/constants.hpp"
#include "ffq/geometry.hpp"
#include "ffq/params.hpp"

namespace ffq {

using ComplexMatrix = Eigen::MatrixXcd;

// Instantaneous electrical controls of one qubit.
struct QubitBias {
  double dEz_V_per_m = 0.0;  // DC field difference from the ionization point
  double eac_V_per_m = 0.0;  // AC drive amplitude (envelope value)
  double f_drive_Hz = 0.0;   // drive frequency; must equal the frame reference
  double phase_rad = 0.0;    // drive phase

  void validate() const {
    if (eac_V_per_m < 0.0) throw std::invalid_argument("QubitBias: Eac must be >= 0");
  }
};

// Orbital detuning e*d*dEz/h in Hz.
inline double orbital_detuning(double dEz_V_per_m, const PhysicalParams& p) {
  return p.orbital_rate() * dEz_V_per_m;
}

// Charge gap sqrt(eps_o^2 + Vt^2) in Hz.
inline double orbital_gap(double dEz_V_per_m, const PhysicalParams& p) {
  return std::hypot(orbital_detuning(dEz_V_per_m, p), p.vt_Hz);
}

// Donor occupancy of the shared electron, 1/2 at the ionization point and
// 0 deep in the interface regime.
inline double donor_fraction(double dEz_V_per_m, const PhysicalParams& p) {
  return 0.5 * (1.0 - orbital_detuning(dEz_V_per_m, p) / orbital_gap(dEz_V_per_m, p));
}

// Flip-flop splitting (gamma_e + gamma_n) B0 + A_eff / 2 with the hyperfine
// reweighted by the donor fraction.
inline double ff_splitting(double dEz_V_per_m, const PhysicalParams& p) {
  return (p.gamma_e_Hz_per_T + p.gamma_n_Hz_per_T) * p.b0_T +
         0.5 * p.a_Hz * donor_fraction(dEz_V_per_m, p);
}

// EDSR Rabi rate; maximal at the ionization point.
inline double rabi_rate(double dEz_V_per_m, double eac_V_per_m, const PhysicalParams& p) {
  if (eac_V_per_m < 0.0) throw std::invalid_argument("rabi_rate: Eac must be >= 0");
  const double gap = orbital_gap(dEz_V_per_m, p);
  const double vt_ratio = p.vt_Hz / gap;
  return 0.25 * p.a_Hz * (p.orbital_rate() * eac_V_per_m / gap) * vt_ratio * vt_ratio;
}

// Charge-dipole coupling strength before the spin mixing factors.
inline double bare_dipole_prefactor(double r_m, const PhysicalParams& p) {
  if (!(r_m > 0.0)) throw std::invalid_argument("dipole: r must be positive");
  const double ed = constants::elementary_charge * p.d_m;
  return ed * ed /
         (16.0 * constants::pi * constants::vacuum_permittivity * p.eps_r *
          constants::planck_h * r_m * r_m * r_m);
}

// Charge-spin mixing factor in (0, 1); vanishes deep in the interface regime,
// which is what decouples idle qubits.
inline double mixing_factor(double dEz_V_per_m, const PhysicalParams& p) {
  const double gap = orbital_gap(dEz_V_per_m, p);
  return (p.vt_Hz / gap) * (0.5 * p.a_Hz / ff_splitting(dEz_V_per_m, p));
}

// XY exchange strength between two qubits, Hz. Multiplies the exchange
// operator (sp_i sm_j + sm_i sp_j), i.e. g_ij is the matrix element between
// |01> and |10> of the pair.
inline double dipole_coupling(double dEz_i, double dEz_j, double r_m, const PhysicalParams& p) {
  return p.g_scale * bare_dipole_prefactor(r_m, p) * mixing_factor(dEz_i, p) *
         mixing_factor(dEz_j, p);
}

// Pairs as (i, j, coupling Hz).
struct CouplingTerm {
  int i = 0;
  int j = 0;
  double g_Hz = 0.0;
};

// Basis convention: qubit 0 occupies the most significant bit, so tensor
// products read left to right in qubit order. sigma_z |0> = +|0>.
inline int qubit_bit(int n_qubits, int qubit) { return n_qubits - 1 - qubit; }

// Dense rotating-frame Hamiltonian in Hz for an n-qubit register:
//   sum_i [ delta_f_i/2 sz_i + omega_i/2 (cos phi sx_i + sin phi sy_i) ]
// + sum_pairs g_ij (sp_i sm_j + sm_i sp_j).
inline void assemble_matrix_into(ComplexMatrix& h, int n_qubits,
                                 const std::vector<double>& delta_f_Hz,
                                 const std::vector<double>& omega_Hz,
                                 const std::vector<double>& phase_rad,
                                 const std::vector<CouplingTerm>& couplings) {
  const int dim = 1 << n_qubits;
  if (static_cast<int>(delta_f_Hz.size()) != n_qubits ||
      static_cast<int>(omega_Hz.size()) != n_qubits ||
      static_cast<int>(phase_rad.size()) != n_qubits)
    throw std::invalid_argument("assemble: per-qubit arrays must match qubit count");
  h.setZero(dim, dim);
  for (int b = 0; b < dim; ++b) {
    double e = 0.0;
    for (int q = 0; q < n_qubits; ++q) {
      const bool excited = (b >> qubit_bit(n_qubits, q)) & 1;
      e += 0.5 * delta_f_Hz[q] * (excited ? -1.0 : 1.0);
    }
    h(b, b) = e;
  }
  for (int q = 0; q < n_qubits; ++q) {
    if (omega_Hz[q] == 0.0) continue;
    const std::complex<double> amp =
        0.5 * omega_Hz[q] *
        std::complex<double>(std::cos(phase_rad[q]), std::sin(phase_rad[q]));
    const int bit = 1 << qubit_bit(n_qubits, q);
    for (int b = 0; b < dim; ++b) {
      if (b & bit) continue;
      // <1|H|0> on qubit q: (cos phi sx + sin phi sy)/1 gives e^{+i phi}.
      h(b | bit, b) += amp;
      h(b, b | bit) += std::conj(amp);
    }
  }
  for (const auto& c : couplings) {
    if (c.i == c.j || c.i < 0 || c.j < 0 || c.i >= n_qubits || c.j >= n_qubits)
      throw std::invalid_argument("assemble: bad coupling indices");
    const int bi = 1 << qubit_bit(n_qubits, c.i);
    const int bj = 1 << qubit_bit(n_qubits, c.j);
    for (int b = 0; b < dim; ++b) {
      if ((b & bi) || !(b & bj)) continue;  // start from |0_i 1_j>
      const int bp = (b | bi) & ~bj;        // to |1_i 0_j>
      h(bp, b) += c.g_Hz;
      h(b, bp) += c.g_Hz;
    }
  }
}

inline ComplexMatrix assemble_matrix(int n_qubits, const std::vector<double>& delta_f_Hz,
                                     const std::vector<double>& omega_Hz,
                                     const std::vector<double>& phase_rad,
                                     const std::vector<CouplingTerm>& couplings) {
  ComplexMatrix h;
  assemble_matrix_into(h, n_qubits, delta_f_Hz, omega_Hz, phase_rad, couplings);
  return h;
}

// Full array Hamiltonian at one instant, in the common rotating frame at
// f_ref. Noise perturbs the DC channel, so it enters the splitting, the Rabi
// rate and the dipole mixing alike.
inline ComplexMatrix assemble(const ArrayGeometry& geometry,
                              const std::vector<QubitBias>& biases,
                              const std::vector<double>& noise_V_per_m, double f_ref_Hz,
                              const PhysicalParams& params) {
  if (biases.size() != kNumQubits || noise_V_per_m.size() != kNumQubits)
    throw std::invalid_argument("assemble: need one bias and noise value per qubit");
  std::vector<double> delta(kNumQubits), omega(kNumQubits), phase(kNumQubits),
      dez(kNumQubits);
  for (int q = 0; q < kNumQubits; ++q) {
    biases[q].validate();
    if (biases[q].eac_V_per_m > 0.0 &&
        std::abs(biases[q].f_drive_Hz - f_ref_Hz) > 1e-6 * f_ref_Hz)
      throw std::invalid_argument("assemble: drive frequency must match the frame reference");
    dez[q] = biases[q].dEz_V_per_m + noise_V_per_m[q];
    delta[q] = ff_splitting(dez[q], params) - f_ref_Hz;
    omega[q] = rabi_rate(dez[q], biases[q].eac_V_per_m, params);
    phase[q] = biases[q].phase_rad;
  }
  std::vector<CouplingTerm> couplings;
  for (const auto& pr : pair_list(geometry))
    couplings.push_back({pr.i, pr.j, dipole_coupling(dez[pr.i], dez[pr.j], pr.r_m, params)});
  return assemble_matrix(kNumQubits, delta, omega, phase, couplings);
}

inline double hermiticity_defect(const ComplexMatrix& h) {
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace ffq
