#include <catch2/catch_amalgamated.hpp>

#include "ffq/fidelity.hpp"
#include "ffq/geometry.hpp"

using namespace ffq;

namespace {
constexpr double kR0 = 360e-9;
}

TEST_CASE("linear array spans 3 r0") {
  auto g = build_geometry(GeometryKind::LA, kR0);
  double max_r = 0.0;
  for (const auto& p : all_pairs(g)) max_r = std::max(max_r, p.r_m);
  CHECK(max_r == Catch::Approx(3.0 * kR0).epsilon(1e-12));
  CHECK(g.interaction_rule == InteractionRule::FirstNeighborOnly);
}

TEST_CASE("square array diagonal is sqrt(2) r0") {
  auto g = build_geometry(GeometryKind::SA, kR0);
  CHECK(distance(g.positions[0], g.positions[2]) ==
        Catch::Approx(std::sqrt(2.0) * kR0).epsilon(1e-12));
  CHECK(g.interaction_rule == InteractionRule::AllPairs);
}

TEST_CASE("star array vertex pairs sit at sqrt(3) r0") {
  auto g = build_geometry(GeometryKind::STA, kR0);
  // qubit 2 is the centre
  for (int v : {0, 2, 3})
    CHECK(distance(g.positions[1], g.positions[v]) == Catch::Approx(kR0).epsilon(1e-12));
  CHECK(distance(g.positions[0], g.positions[2]) ==
        Catch::Approx(std::sqrt(3.0) * kR0).epsilon(1e-12));
  CHECK(distance(g.positions[0], g.positions[3]) ==
        Catch::Approx(std::sqrt(3.0) * kR0).epsilon(1e-12));
  CHECK(distance(g.positions[2], g.positions[3]) ==
        Catch::Approx(std::sqrt(3.0) * kR0).epsilon(1e-12));
}

TEST_CASE("build_geometry rejects bad input") {
  CHECK_THROWS_AS(build_geometry(GeometryKind::LA, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_geometry(GeometryKind::SA, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(geometry_kind_from_string("hexagon"), std::invalid_argument);
}

TEST_CASE("pair_list honors the interaction rule") {
  auto la = build_geometry(GeometryKind::LA, kR0);
  auto pairs = pair_list(la);
  REQUIRE(pairs.size() == 3);
  for (size_t k = 0; k < pairs.size(); ++k) {
    CHECK(pairs[k].i == static_cast<int>(k));
    CHECK(pairs[k].j == static_cast<int>(k) + 1);
    CHECK(pairs[k].r_m == Catch::Approx(kR0).epsilon(1e-12));
  }

  // Brute force over all 4-choose-2 pairs for the 2-D arrays.
  auto sa = build_geometry(GeometryKind::SA, kR0);
  auto sa_pairs = pair_list(sa);
  REQUIRE(sa_pairs.size() == 6);
  int sa_r0 = 0, sa_diag = 0;
  for (const auto& p : sa_pairs) {
    if (std::abs(p.r_m - kR0) < 1e-18) ++sa_r0;
    if (std::abs(p.r_m - std::sqrt(2.0) * kR0) < 1e-15) ++sa_diag;
  }
  CHECK(sa_r0 == 4);
  CHECK(sa_diag == 2);

  auto sta = build_geometry(GeometryKind::STA, kR0);
  auto sta_pairs = pair_list(sta);
  REQUIRE(sta_pairs.size() == 6);
  int sta_r0 = 0, sta_far = 0;
  for (const auto& p : sta_pairs) {
    if (std::abs(p.r_m - kR0) < 1e-15) ++sta_r0;
    if (std::abs(p.r_m - std::sqrt(3.0) * kR0) < 1e-15) ++sta_far;
  }
  CHECK(sta_r0 == 3);
  CHECK(sta_far == 3);
}

TEST_CASE("symmetry group sizes match the point groups") {
  CHECK(symmetry_permutations(build_geometry(GeometryKind::LA, kR0)).size() == 2);
  CHECK(symmetry_permutations(build_geometry(GeometryKind::SA, kR0)).size() == 8);
  CHECK(symmetry_permutations(build_geometry(GeometryKind::STA, kR0)).size() == 6);
}

TEST_CASE("geometry serialization round-trips") {
  for (auto kind : {GeometryKind::LA, GeometryKind::SA, GeometryKind::STA}) {
    auto g = build_geometry(kind, kR0);
    auto kv = serialize_geometry(g);
    auto back = parse_geometry(io::KeyValueFile::parse_text(kv.to_text()));
    CHECK(back.kind == g.kind);
    CHECK(back.r0_m == Catch::Approx(g.r0_m));
    CHECK(back.interaction_rule == g.interaction_rule);
    for (int q = 0; q < kNumQubits; ++q) {
      CHECK(back.positions[q].x == Catch::Approx(g.positions[q].x).margin(1e-18));
      CHECK(back.positions[q].y == Catch::Approx(g.positions[q].y).margin(1e-18));
    }
  }
}

TEST_CASE("delta metric matches the published interaction densities") {
  CHECK(delta_metric(build_geometry(GeometryKind::LA, kR0)) == Catch::Approx(3.29).margin(0.01));
  CHECK(delta_metric(build_geometry(GeometryKind::SA, kR0)) == Catch::Approx(4.70).margin(0.01));
  // Brute-force oracle for the star value; the write-up quotes 3.51 but the
  // pair sum gives 3 + 3/sqrt(27).
  const double oracle = 3.0 + 3.0 * std::pow(std::sqrt(3.0), -3.0);
  CHECK(delta_metric(build_geometry(GeometryKind::STA, kR0)) ==
        Catch::Approx(oracle).margin(1e-3));
  CHECK(oracle == Catch::Approx(3.577).margin(1e-3));

  const double la = delta_metric(build_geometry(GeometryKind::LA, kR0));
  const double sa = delta_metric(build_geometry(GeometryKind::SA, kR0));
  const double sta = delta_metric(build_geometry(GeometryKind::STA, kR0));
  CHECK(la < sta);
  CHECK(sta < sa);
}

TEST_CASE("delta metric is independent of the numeric r0") {
  for (auto kind : {GeometryKind::LA, GeometryKind::SA, GeometryKind::STA}) {
    const double a = delta_metric(build_geometry(kind, 100e-9));
    const double b = delta_metric(build_geometry(kind, 777e-9));
    CHECK(a == Catch::Approx(b).epsilon(1e-12));
  }
}
