#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "ffq/fidelity.hpp"

using namespace ffq;

namespace {

ComplexMatrix random_unitary(int dim, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  ComplexMatrix m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) m(r, c) = std::complex<double>(dist(rng), dist(rng));
  Eigen::HouseholderQR<ComplexMatrix> qr(m);
  ComplexMatrix q = qr.householderQ();
  return q;
}

}  // namespace

TEST_CASE("entanglement fidelity basics") {
  auto u = random_unitary(8, 5);
  CHECK(entanglement_fidelity(u, u) == Catch::Approx(1.0).margin(1e-12));
  const std::complex<double> phase = std::exp(std::complex<double>(0.0, 1.234));
  CHECK(entanglement_fidelity(ComplexMatrix(phase * u), u) == Catch::Approx(1.0).margin(1e-12));

  ComplexMatrix sx(2, 2);
  sx << 0, 1, 1, 0;
  CHECK(entanglement_fidelity(sx, ComplexMatrix::Identity(2, 2)) == Catch::Approx(0.0).margin(1e-15));

  CHECK_THROWS_AS(entanglement_fidelity(sx, ComplexMatrix::Identity(4, 4)),
                  std::invalid_argument);
}

TEST_CASE("fidelity depends only on the relative unitary") {
  auto u = random_unitary(16, 9);
  auto v = random_unitary(16, 10);
  const double direct = entanglement_fidelity(ComplexMatrix(u * v), u);
  const double relative = entanglement_fidelity(v, ComplexMatrix::Identity(16, 16));
  CHECK(direct == Catch::Approx(relative).margin(1e-12));
}

TEST_CASE("target unitary places gates on operated qubits") {
  auto la = build_geometry(GeometryKind::LA, 360e-9);

  // c1 with Rz: Rz on qubit 1, identity elsewhere
  auto c1 = make_configuration(la, OpKind::OneQubit, {{0}});
  auto t1 = target_unitary(c1, GateId::Rz);
  ComplexMatrix rz = ideal_gate_matrix(GateId::Rz);
  for (int b = 0; b < 16; ++b) {
    const int bit = 1 << qubit_bit(4, 0);
    const std::complex<double> expect = (b & bit) ? rz(1, 1) : rz(0, 0);
    CHECK(std::abs(t1(b, b) - expect) < 1e-15);
  }

  // c1234 with Rx equals the four-fold Kronecker power
  auto c1234 = make_configuration(la, OpKind::OneQubit, {{0}, {1}, {2}, {3}});
  auto t4 = target_unitary(c1234, GateId::Rx);
  ComplexMatrix rx = ideal_gate_matrix(GateId::Rx);
  ComplexMatrix kron = rx;
  for (int k = 0; k < 3; ++k) {
    ComplexMatrix next(kron.rows() * 2, kron.cols() * 2);
    for (int r = 0; r < kron.rows(); ++r)
      for (int c = 0; c < kron.cols(); ++c) next.block(2 * r, 2 * c, 2, 2) = kron(r, c) * rx;
    kron = next;
  }
  CHECK((t4 - kron).cwiseAbs().maxCoeff() < 1e-14);

  // c12-34 with sqrt(iSWAP): block product on both pairs
  auto c1234_2q = make_configuration(la, OpKind::TwoQubit, {{0, 1}, {2, 3}});
  auto t2q = target_unitary(c1234_2q, GateId::SqrtISwap);
  ComplexMatrix sis = ideal_gate_matrix(GateId::SqrtISwap);
  ComplexMatrix kron2(16, 16);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) kron2.block(4 * r, 4 * c, 4, 4) = sis(r, c) * sis;
  CHECK((t2q - kron2).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("aggregate matches an independent mean and stderr computation") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> dist(0.9, 1.0);
  std::vector<double> fs(100);
  for (auto& f : fs) f = dist(rng);

  auto rec = aggregate(fs);
  // independent oracle with long double accumulation
  long double mean = 0.0L;
  for (double f : fs) mean += 1.0L - static_cast<long double>(f);
  mean /= fs.size();
  long double var = 0.0L;
  for (double f : fs) {
    const long double d = (1.0L - static_cast<long double>(f)) - mean;
    var += d * d;
  }
  var /= (fs.size() - 1);
  const double stderr_oracle = static_cast<double>(std::sqrt(var / fs.size()));
  CHECK(rec.mean_infidelity == Catch::Approx(static_cast<double>(mean)).epsilon(1e-12));
  CHECK(rec.std_error == Catch::Approx(stderr_oracle).epsilon(1e-10));
  CHECK(rec.n_instances == 100);
}

TEST_CASE("aggregate trivial cases") {
  auto all_perfect = aggregate({1.0, 1.0, 1.0});
  CHECK(all_perfect.mean_infidelity == 0.0);
  CHECK(all_perfect.std_error == 0.0);

  auto half = aggregate({1.0, 0.0});
  CHECK(half.mean_infidelity == Catch::Approx(0.5));

  CHECK_THROWS_AS(aggregate({}), std::invalid_argument);
}

TEST_CASE("fidelity record CSV round trip") {
  FidelityRecord r;
  r.configuration = "c12-34";
  r.gate = GateId::SqrtISwap;
  r.alpha_V_per_m = 50.0;
  r.mean_infidelity = 1.934e-2;
  r.std_error = 4.2e-4;
  r.n_instances = 100;
  auto row = to_csv_row(r);
  auto back = parse_csv_row(row);
  CHECK(back.configuration == r.configuration);
  CHECK(back.gate == r.gate);
  CHECK(back.alpha_V_per_m == r.alpha_V_per_m);
  CHECK(back.mean_infidelity == r.mean_infidelity);
  CHECK(back.std_error == r.std_error);
  CHECK(back.n_instances == r.n_instances);
}
