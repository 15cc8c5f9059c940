#include <catch2/catch_amalgamated.hpp>
#include <set>

#include "ffq/configuration.hpp"

using namespace ffq;

namespace {

constexpr double kR0 = 360e-9;

std::set<std::string> labels(const std::vector<Configuration>& configs) {
  std::set<std::string> out;
  for (const auto& c : configs) out.insert(c.label);
  return out;
}

using LabelSet = std::set<std::string>;

}  // namespace

TEST_CASE("one-qubit representatives match the studied sets") {
  auto la = build_geometry(GeometryKind::LA, kR0);
  CHECK(labels(enumerate_configurations(la, OpKind::OneQubit, 1)) == LabelSet{"c1", "c2"});
  CHECK(labels(enumerate_configurations(la, OpKind::OneQubit, 2)) ==
        LabelSet{"c12", "c13", "c14", "c23"});
  CHECK(labels(enumerate_configurations(la, OpKind::OneQubit, 3)) == LabelSet{"c123", "c124"});
  CHECK(labels(enumerate_configurations(la, OpKind::OneQubit, 4)) == LabelSet{"c1234"});

  auto sa = build_geometry(GeometryKind::SA, kR0);
  CHECK(labels(enumerate_configurations(sa, OpKind::OneQubit, 1)) == LabelSet{"c1"});
  CHECK(labels(enumerate_configurations(sa, OpKind::OneQubit, 2)) == LabelSet{"c12", "c13"});
  CHECK(labels(enumerate_configurations(sa, OpKind::OneQubit, 3)) == LabelSet{"c123"});
  CHECK(labels(enumerate_configurations(sa, OpKind::OneQubit, 4)) == LabelSet{"c1234"});

  auto sta = build_geometry(GeometryKind::STA, kR0);
  CHECK(labels(enumerate_configurations(sta, OpKind::OneQubit, 1)) == LabelSet{"c1", "c2"});
  CHECK(labels(enumerate_configurations(sta, OpKind::OneQubit, 2)) == LabelSet{"c12", "c13"});
  CHECK(labels(enumerate_configurations(sta, OpKind::OneQubit, 3)) == LabelSet{"c123", "c134"});
  CHECK(labels(enumerate_configurations(sta, OpKind::OneQubit, 4)) == LabelSet{"c1234"});
}

TEST_CASE("two-qubit representatives follow the r0 rule") {
  auto la = build_geometry(GeometryKind::LA, kR0);
  CHECK(labels(enumerate_configurations(la, OpKind::TwoQubit, 1)) == LabelSet{"c12", "c23"});
  CHECK(labels(enumerate_configurations(la, OpKind::TwoQubit, 2)) == LabelSet{"c12-34"});

  auto sa = build_geometry(GeometryKind::SA, kR0);
  CHECK(labels(enumerate_configurations(sa, OpKind::TwoQubit, 1)) == LabelSet{"c12"});
  CHECK(labels(enumerate_configurations(sa, OpKind::TwoQubit, 2)) == LabelSet{"c12-34"});

  auto sta = build_geometry(GeometryKind::STA, kR0);
  CHECK(labels(enumerate_configurations(sta, OpKind::TwoQubit, 1)) == LabelSet{"c12"});
  CHECK(enumerate_configurations(sta, OpKind::TwoQubit, 2).empty());
}

TEST_CASE("enumerate rejects invalid parallelism") {
  auto la = build_geometry(GeometryKind::LA, kR0);
  CHECK_THROWS_AS(enumerate_configurations(la, OpKind::OneQubit, 0), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_configurations(la, OpKind::OneQubit, 5), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_configurations(la, OpKind::TwoQubit, 3), std::invalid_argument);
}

TEST_CASE("orbits cover every index-valid configuration") {
  for (auto kind : {GeometryKind::LA, GeometryKind::SA, GeometryKind::STA}) {
    auto g = build_geometry(kind, kR0);
    auto group = symmetry_permutations(g);
    for (int par = 1; par <= 4; ++par) {
      auto reps = enumerate_configurations(g, OpKind::OneQubit, par);
      std::set<std::string> covered;
      for (const auto& rep : reps) {
        for (const auto& perm : group) {
          auto mapped = detail::apply_permutation(rep.operated, perm);
          covered.insert(format_label(mapped, OpKind::OneQubit));
        }
      }
      std::set<std::string> universe;
      for (const auto& cand : detail::candidate_targets(g, OpKind::OneQubit, par))
        universe.insert(format_label(cand, OpKind::OneQubit));
      CHECK(covered == universe);
    }
    for (int par = 1; par <= 2; ++par) {
      auto reps = enumerate_configurations(g, OpKind::TwoQubit, par);
      std::set<std::string> covered;
      for (const auto& rep : reps)
        for (const auto& perm : group)
          covered.insert(format_label(detail::apply_permutation(rep.operated, perm),
                                      OpKind::TwoQubit));
      std::set<std::string> universe;
      for (const auto& cand : detail::candidate_targets(g, OpKind::TwoQubit, par))
        universe.insert(format_label(cand, OpKind::TwoQubit));
      CHECK(covered == universe);
    }
  }
}

TEST_CASE("enumeration is deterministic") {
  auto sta = build_geometry(GeometryKind::STA, kR0);
  auto a = enumerate_configurations(sta, OpKind::OneQubit, 2);
  auto b = enumerate_configurations(sta, OpKind::OneQubit, 2);
  REQUIRE(a.size() == b.size());
  for (size_t k = 0; k < a.size(); ++k) CHECK(a[k].label == b[k].label);
}

TEST_CASE("two-qubit targets all sit at r0 exactly") {
  for (auto kind : {GeometryKind::LA, GeometryKind::SA, GeometryKind::STA}) {
    auto g = build_geometry(kind, kR0);
    for (int par : {1, 2}) {
      for (const auto& rep : enumerate_configurations(g, OpKind::TwoQubit, par)) {
        for (const auto& pair : rep.operated) {
          REQUIRE(pair.size() == 2);
          CHECK(distance(g.positions[pair[0]], g.positions[pair[1]]) ==
                Catch::Approx(g.r0_m).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("labels parse and format consistently") {
  auto la = build_geometry(GeometryKind::LA, kR0);
  auto c = make_configuration(la, OpKind::TwoQubit, parse_label("c12-34", OpKind::TwoQubit));
  CHECK(c.label == "c12-34");
  CHECK(c.idle.empty());
  CHECK(c.parallelism() == 2);

  auto single = make_configuration(la, OpKind::OneQubit, parse_label("c3", OpKind::OneQubit));
  CHECK(single.idle == std::vector<int>{0, 1, 3});
  CHECK(single.contains_qubit(2));

  CHECK_THROWS_AS(parse_label("c11", OpKind::OneQubit), std::invalid_argument);
  CHECK_THROWS_AS(parse_label("c15", OpKind::OneQubit), std::invalid_argument);
  CHECK_THROWS_AS(parse_label("x12", OpKind::OneQubit), std::invalid_argument);
  // pair (1,3) is not at r0 in the linear array
  CHECK_THROWS_AS(make_configuration(la, OpKind::TwoQubit, {{0, 2}}), std::invalid_argument);
}
