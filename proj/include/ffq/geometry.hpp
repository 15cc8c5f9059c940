#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "ffq/io.hpp"

namespace ffq {

inline constexpr int kNumQubits = 4;

enum class GeometryKind { LA, SA, STA };
enum class InteractionRule { FirstNeighborOnly, AllPairs };

inline std::string to_string(GeometryKind k) {
  switch (k) {
    case GeometryKind::LA: return "LA";
    case GeometryKind::SA: return "SA";
    case GeometryKind::STA: return "STA";
  }
  return "?";
}

inline GeometryKind geometry_kind_from_string(const std::string& s) {
  if (s == "LA") return GeometryKind::LA;
  if (s == "SA") return GeometryKind::SA;
  if (s == "STA") return GeometryKind::STA;
  throw std::invalid_argument("unknown geometry kind: " + s);
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

struct QubitPair {
  int i = 0;  // 0-based qubit indices, i < j
  int j = 0;
  double r_m = 0.0;
};

// Four-qubit array layout. Qubit numbering follows the paper's figures:
// LA is collinear 1-2-3-4, SA corners are numbered so (1,3) is a diagonal,
// STA has qubit 2 at the centre of three equidistant vertices.
struct ArrayGeometry {
  GeometryKind kind = GeometryKind::LA;
  double r0_m = 0.0;
  std::array<Vec2, kNumQubits> positions{};
  InteractionRule interaction_rule = InteractionRule::AllPairs;

  void validate() const {
    if (!(r0_m > 0.0)) throw std::invalid_argument("geometry: r0 must be positive");
    double min_r = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kNumQubits; ++i)
      for (int j = i + 1; j < kNumQubits; ++j)
        min_r = std::min(min_r, distance(positions[i], positions[j]));
    if (std::abs(min_r - r0_m) > 1e-9 * r0_m)
      throw std::invalid_argument("geometry: min pairwise distance != r0");
  }
};

inline ArrayGeometry build_geometry(GeometryKind kind, double r0_m) {
  if (!(r0_m > 0.0)) throw std::invalid_argument("build_geometry: r0 must be positive");
  ArrayGeometry g;
  g.kind = kind;
  g.r0_m = r0_m;
  switch (kind) {
    case GeometryKind::LA:
      for (int i = 0; i < kNumQubits; ++i) g.positions[i] = {i * r0_m, 0.0};
      g.interaction_rule = InteractionRule::FirstNeighborOnly;
      break;
    case GeometryKind::SA:
      g.positions = {Vec2{0.0, 0.0}, Vec2{r0_m, 0.0}, Vec2{r0_m, r0_m}, Vec2{0.0, r0_m}};
      g.interaction_rule = InteractionRule::AllPairs;
      break;
    case GeometryKind::STA: {
      // Vertices at circumradius r0 around the central qubit 2; the overall
      // orientation is immaterial since only pair distances enter the model.
      const double s = std::sqrt(3.0) / 2.0;
      g.positions[0] = {0.0, r0_m};          // qubit 1, vertex
      g.positions[1] = {0.0, 0.0};           // qubit 2, centre
      g.positions[2] = {-s * r0_m, -0.5 * r0_m};  // qubit 3, vertex
      g.positions[3] = {s * r0_m, -0.5 * r0_m};   // qubit 4, vertex
      g.interaction_rule = InteractionRule::AllPairs;
      break;
    }
  }
  g.validate();
  return g;
}

// Pairs that enter the interaction Hamiltonian. The linear array keeps only
// first neighbours; the 2-D arrays keep all six pairs.
inline std::vector<QubitPair> pair_list(const ArrayGeometry& g) {
  std::vector<QubitPair> pairs;
  for (int i = 0; i < kNumQubits; ++i) {
    for (int j = i + 1; j < kNumQubits; ++j) {
      if (g.interaction_rule == InteractionRule::FirstNeighborOnly && j != i + 1) continue;
      pairs.push_back({i, j, distance(g.positions[i], g.positions[j])});
    }
  }
  return pairs;
}

inline std::vector<QubitPair> all_pairs(const ArrayGeometry& g) {
  std::vector<QubitPair> pairs;
  for (int i = 0; i < kNumQubits; ++i)
    for (int j = i + 1; j < kNumQubits; ++j)
      pairs.push_back({i, j, distance(g.positions[i], g.positions[j])});
  return pairs;
}

// Point group of the layout as qubit-index permutations: every permutation
// that preserves all pairwise distances. Computed by search so the orbit
// reduction can be cross-checked against brute force.
inline std::vector<std::array<int, kNumQubits>> symmetry_permutations(const ArrayGeometry& g) {
  std::array<int, kNumQubits> perm{};
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::array<int, kNumQubits>> group;
  const double tol = 1e-9 * g.r0_m;
  do {
    bool ok = true;
    for (int i = 0; i < kNumQubits && ok; ++i)
      for (int j = i + 1; j < kNumQubits && ok; ++j) {
        double d0 = distance(g.positions[i], g.positions[j]);
        double d1 = distance(g.positions[perm[i]], g.positions[perm[j]]);
        if (std::abs(d0 - d1) > tol) ok = false;
      }
    if (ok) group.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return group;
}

inline io::KeyValueFile serialize_geometry(const ArrayGeometry& g) {
  auto nm = [](double metres) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", metres * 1e9);
    return std::string(buf);
  };
  io::KeyValueFile kv;
  kv.set("kind", to_string(g.kind));
  kv.set("r0_nm", nm(g.r0_m));
  kv.set("interaction_rule", g.interaction_rule == InteractionRule::FirstNeighborOnly
                                 ? "first_neighbor"
                                 : "all_pairs");
  for (int i = 0; i < kNumQubits; ++i) {
    kv.set("position_" + std::to_string(i + 1) + "_nm",
           nm(g.positions[i].x) + ", " + nm(g.positions[i].y));
  }
  return kv;
}

inline ArrayGeometry parse_geometry(const io::KeyValueFile& kv) {
  ArrayGeometry g;
  g.kind = geometry_kind_from_string(kv.get("kind"));
  g.r0_m = kv.get_double("r0_nm") * 1e-9;
  std::string rule = kv.get_or("interaction_rule", "all_pairs");
  if (rule == "first_neighbor")
    g.interaction_rule = InteractionRule::FirstNeighborOnly;
  else if (rule == "all_pairs")
    g.interaction_rule = InteractionRule::AllPairs;
  else
    throw std::invalid_argument("unknown interaction_rule: " + rule);
  for (int i = 0; i < kNumQubits; ++i) {
    auto parts = io::KeyValueFile::parse_text(
                     "p = " + kv.get("position_" + std::to_string(i + 1) + "_nm"))
                     .get_double_list("p");
    if (parts.size() != 2) throw std::invalid_argument("position needs two coordinates");
    g.positions[i] = {parts[0] * 1e-9, parts[1] * 1e-9};
  }
  g.validate();
  return g;
}

}  // namespace ffq
