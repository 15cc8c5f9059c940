#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "ffq/constants.hpp"
#include "ffq/hamiltonian.hpp"

namespace ffq {

struct TimeGrid {
  double t0_s = 0.0;
  double t1_s = 0.0;
  double dt_s = 0.0;

  int n_steps() const {
    return static_cast<int>(std::ceil((t1_s - t0_s) / dt_s - 1e-9));
  }

  void validate(double noise_f_max_Hz = 0.0) const {
    if (!(t1_s > t0_s)) throw std::invalid_argument("TimeGrid: t1 must exceed t0");
    if (!(dt_s > 0.0)) throw std::invalid_argument("TimeGrid: dt must be positive");
    if (noise_f_max_Hz > 0.0 && dt_s > 1.0 / (4.0 * noise_f_max_Hz) * (1.0 + 1e-12))
      throw std::invalid_argument("TimeGrid: dt too coarse for the noise band (dt <= 1/(4 f_max))");
  }
};

// Fills h with the Hamiltonian (Hz) at time t. h arrives preallocated.
using HamiltonianBuilder = std::function<void(double t, ComplexMatrix&)>;

inline double unitarity_defect(const ComplexMatrix& u) {
  ComplexMatrix d = u.adjoint() * u;
  d.diagonal().array() -= 1.0;
  return d.cwiseAbs().maxCoeff();
}

namespace detail {

// Basis indices grouped by excitation number. Drive-free Hamiltonians
// conserve it, which cuts the per-step eigendecomposition cost.
inline std::vector<std::vector<int>> excitation_sectors(int n_qubits) {
  std::vector<std::vector<int>> sectors(static_cast<size_t>(n_qubits) + 1);
  for (int b = 0; b < (1 << n_qubits); ++b)
    sectors[static_cast<size_t>(__builtin_popcount(static_cast<unsigned>(b)))].push_back(b);
  return sectors;
}

inline void exp_step_full(const ComplexMatrix& h, double dt,
                          Eigen::SelfAdjointEigenSolver<ComplexMatrix>& solver,
                          ComplexMatrix& step) {
  solver.compute(h);
  const auto& evals = solver.eigenvalues();
  const auto& vecs = solver.eigenvectors();
  Eigen::VectorXcd phases(evals.size());
  for (Eigen::Index k = 0; k < evals.size(); ++k) {
    const double angle = -constants::two_pi * evals(k) * dt;
    phases(k) = std::complex<double>(std::cos(angle), std::sin(angle));
  }
  step.noalias() = vecs * phases.asDiagonal() * vecs.adjoint();
}

}  // namespace detail

// Time-ordered product of midpoint-rule step exponentials,
//   U = prod_k exp(-2 pi i H(t_k + dt/2) dt),
// each step exactly unitary through the Hermitian eigendecomposition.
// `number_conserving` enables the excitation-sector fast path; results agree
// with the full path to machine precision when the flag is honest.
inline ComplexMatrix propagate_hamiltonian(int n_qubits, const TimeGrid& grid,
                                           const HamiltonianBuilder& build,
                                           bool number_conserving = false,
                                           double* defect_out = nullptr) {
  grid.validate();
  const int dim = 1 << n_qubits;
  const int n = grid.n_steps();
  const double dt = (grid.t1_s - grid.t0_s) / n;

  ComplexMatrix u = ComplexMatrix::Identity(dim, dim);
  ComplexMatrix h(dim, dim), step(dim, dim);

  if (!number_conserving) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(dim);
    for (int k = 0; k < n; ++k) {
      const double t_mid = grid.t0_s + (k + 0.5) * dt;
      build(t_mid, h);
      if (hermiticity_defect(h) > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff()))
        throw std::runtime_error("propagate: assembled Hamiltonian is not Hermitian");
      detail::exp_step_full(h, dt, solver, step);
      u = step * u;
    }
  } else {
    const auto sectors = detail::excitation_sectors(n_qubits);
    std::vector<Eigen::SelfAdjointEigenSolver<ComplexMatrix>> solvers;
    std::vector<ComplexMatrix> blocks, ublocks;
    for (const auto& s : sectors) {
      solvers.emplace_back(static_cast<Eigen::Index>(s.size()));
      blocks.emplace_back(s.size(), s.size());
      ublocks.emplace_back(s.size(), s.size());
    }
    ComplexMatrix rows(dim, dim);
    for (int k = 0; k < n; ++k) {
      const double t_mid = grid.t0_s + (k + 0.5) * dt;
      build(t_mid, h);
      if (hermiticity_defect(h) > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff()))
        throw std::runtime_error("propagate: assembled Hamiltonian is not Hermitian");
      for (size_t s = 0; s < sectors.size(); ++s) {
        const auto& idx = sectors[s];
        const int m = static_cast<int>(idx.size());
        auto& block = blocks[s];
        for (int r = 0; r < m; ++r)
          for (int c = 0; c < m; ++c) block(r, c) = h(idx[r], idx[c]);
        if (m == 1) {
          const double angle = -constants::two_pi * block(0, 0).real() * dt;
          ublocks[s](0, 0) = std::complex<double>(std::cos(angle), std::sin(angle));
        } else {
          detail::exp_step_full(block, dt, solvers[s], ublocks[s]);
        }
      }
      // u <- step * u with the block structure of step.
      for (size_t s = 0; s < sectors.size(); ++s) {
        const auto& idx = sectors[s];
        const int m = static_cast<int>(idx.size());
        for (int r = 0; r < m; ++r) rows.row(r) = u.row(idx[r]);
        for (int r = 0; r < m; ++r) {
          Eigen::RowVectorXcd acc = Eigen::RowVectorXcd::Zero(dim);
          for (int c = 0; c < m; ++c) acc.noalias() += ublocks[s](r, c) * rows.row(c);
          u.row(idx[r]) = acc;
        }
      }
    }
  }

  const double defect = unitarity_defect(u);
  if (defect_out) *defect_out = defect;
  if (defect > 1e-9) throw std::runtime_error("propagate: unitarity lost beyond 1e-9");
  return u;
}

// Self-convergence estimate: max-norm difference between evolving with dt and
// with dt/2 over the same interval.
inline double convergence_check(int n_qubits, const TimeGrid& grid,
                                const HamiltonianBuilder& build,
                                bool number_conserving = false) {
  TimeGrid half = grid;
  half.dt_s = grid.dt_s / 2.0;
  ComplexMatrix u1 = propagate_hamiltonian(n_qubits, grid, build, number_conserving);
  ComplexMatrix u2 = propagate_hamiltonian(n_qubits, half, build, number_conserving);
  return (u1 - u2).cwiseAbs().maxCoeff();
}

}  // namespace ffq
