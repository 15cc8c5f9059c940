#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ffq/configuration.hpp"
#include "ffq/gates.hpp"
#include "ffq/io.hpp"

namespace ffq {

// Entanglement fidelity |Tr(U_target^dag U_actual)|^2 / d^2; invariant under
// global phases of either argument.
inline double entanglement_fidelity(const ComplexMatrix& u_actual,
                                    const ComplexMatrix& u_target) {
  if (u_actual.rows() != u_target.rows() || u_actual.cols() != u_target.cols() ||
      u_actual.rows() != u_actual.cols())
    throw std::invalid_argument("entanglement_fidelity: dimension mismatch");
  const std::complex<double> tr = (u_target.adjoint() * u_actual).trace();
  const double d = static_cast<double>(u_actual.rows());
  return std::norm(tr) / (d * d);
}

// Ideal gate on each operated target set, identity on idle qubits, in qubit
// order on the full register.
inline ComplexMatrix target_unitary(const Configuration& configuration, GateId gate) {
  const int dim = 1 << kNumQubits;
  ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
  ComplexMatrix g = ideal_gate_matrix(gate);
  for (const auto& targets : configuration.operated) {
    ComplexMatrix expanded = ComplexMatrix::Zero(dim, dim);
    if (targets.size() == 1) {
      if (g.rows() != 2) throw std::invalid_argument("target_unitary: gate/target mismatch");
      const int bit = 1 << qubit_bit(kNumQubits, targets[0]);
      for (int b = 0; b < dim; ++b) {
        const int rb = (b & bit) ? 1 : 0;
        for (int c = 0; c < 2; ++c) {
          const int bc = (b & ~bit) | (c ? bit : 0);
          expanded(b, bc) = g(rb, c);
        }
      }
    } else if (targets.size() == 2) {
      if (g.rows() != 4) throw std::invalid_argument("target_unitary: gate/target mismatch");
      const int bi = 1 << qubit_bit(kNumQubits, targets[0]);
      const int bj = 1 << qubit_bit(kNumQubits, targets[1]);
      for (int b = 0; b < dim; ++b) {
        const int rb = ((b & bi) ? 2 : 0) | ((b & bj) ? 1 : 0);
        for (int c = 0; c < 4; ++c) {
          const int bc = (b & ~bi & ~bj) | ((c & 2) ? bi : 0) | ((c & 1) ? bj : 0);
          expanded(b, bc) = g(rb, c);
        }
      }
    } else {
      throw std::invalid_argument("target_unitary: unsupported target size");
    }
    u = expanded * u;
  }
  return u;
}

// Interaction density of Eq.-style pair sum, in units of r0^-3. Always sums
// all pairs regardless of the geometry's interaction rule; the truncated LA
// rule applies to the dynamics, not to this diagnostic.
inline double delta_metric(const ArrayGeometry& geometry) {
  double acc = 0.0;
  for (const auto& p : all_pairs(geometry)) {
    const double ratio = p.r_m / geometry.r0_m;
    acc += 1.0 / (ratio * ratio * ratio);
  }
  return acc;
}

struct FidelityRecord {
  std::string configuration;
  GateId gate = GateId::Rz;
  double alpha_V_per_m = 0.0;
  double mean_infidelity = 0.0;
  double std_error = 0.0;
  int n_instances = 0;
};

inline FidelityRecord aggregate(const std::vector<double>& fidelities) {
  if (fidelities.empty()) throw std::invalid_argument("aggregate: empty fidelity list");
  const int n = static_cast<int>(fidelities.size());
  double mean = 0.0;
  for (double f : fidelities) mean += 1.0 - f;
  mean /= n;
  double var = 0.0;
  for (double f : fidelities) {
    const double d = (1.0 - f) - mean;
    var += d * d;
  }
  var = n > 1 ? var / (n - 1) : 0.0;
  FidelityRecord rec;
  rec.mean_infidelity = mean;
  rec.std_error = std::sqrt(var / n);
  rec.n_instances = n;
  return rec;
}

inline std::string csv_header() {
  return "config,gate,alpha_V_per_m,mean_infidelity,std_error,n_instances";
}

inline std::string to_csv_row(const FidelityRecord& r) {
  return r.configuration + "," + to_string(r.gate) + "," + io::format_double(r.alpha_V_per_m) +
         "," + io::format_double(r.mean_infidelity) + "," + io::format_double(r.std_error) +
         "," + std::to_string(r.n_instances);
}

inline FidelityRecord parse_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(cur);
  if (fields.size() != 6) throw std::runtime_error("bad record row: " + line);
  FidelityRecord r;
  r.configuration = io::KeyValueFile::trim(fields[0]);
  r.gate = gate_from_string(io::KeyValueFile::trim(fields[1]));
  r.alpha_V_per_m = std::stod(fields[2]);
  r.mean_infidelity = std::stod(fields[3]);
  r.std_error = std::stod(fields[4]);
  r.n_instances = std::stoi(fields[5]);
  return r;
}

}  // namespace ffq
