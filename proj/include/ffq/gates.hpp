#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ffq/hamiltonian.hpp"

namespace ffq {

enum class GateId { Rz, Rx, SqrtISwap, Idle };

inline std::string to_string(GateId g) {
  switch (g) {
    case GateId::Rz: return "Rz";
    case GateId::Rx: return "Rx";
    case GateId::SqrtISwap: return "sqrt_iswap";
    case GateId::Idle: return "idle";
  }
  return "?";
}

inline GateId gate_from_string(const std::string& s) {
  if (s == "Rz" || s == "rz") return GateId::Rz;
  if (s == "Rx" || s == "rx") return GateId::Rx;
  if (s == "sqrt_iswap" || s == "sqrtiswap" || s == "siswap") return GateId::SqrtISwap;
  if (s == "idle") return GateId::Idle;
  throw std::invalid_argument("unknown gate: " + s);
}

inline bool is_two_qubit(GateId g) { return g == GateId::SqrtISwap; }

// Ideal gate matrices. Rotation convention R_a(theta) = exp(-i theta sigma_a / 2);
// the paper's gate set uses theta = -pi/2 rotations.
inline ComplexMatrix ideal_gate_matrix(GateId g) {
  using namespace std::complex_literals;
  const double c = 1.0 / std::sqrt(2.0);
  switch (g) {
    case GateId::Rz: {
      ComplexMatrix m = ComplexMatrix::Zero(2, 2);
      m(0, 0) = std::exp(1i * (constants::pi / 4.0));
      m(1, 1) = std::exp(-1i * (constants::pi / 4.0));
      return m;
    }
    case GateId::Rx: {
      ComplexMatrix m(2, 2);
      m << c, 1i * c, 1i * c, c;
      return m;
    }
    case GateId::SqrtISwap: {
      ComplexMatrix m = ComplexMatrix::Identity(4, 4);
      m(1, 1) = c;
      m(2, 2) = c;
      m(1, 2) = 1i * c;
      m(2, 1) = 1i * c;
      return m;
    }
    case GateId::Idle: return ComplexMatrix::Identity(2, 2);
  }
  throw std::invalid_argument("ideal_gate_matrix: bad gate");
}

}  // namespace ffq
