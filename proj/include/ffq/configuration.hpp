#pragma once

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ffq/geometry.hpp"

namespace ffq {

enum class OpKind { OneQubit, TwoQubit };

inline std::string to_string(OpKind k) {
  return k == OpKind::OneQubit ? "one_qubit" : "two_qubit";
}

// Which qubits receive parallel gates while the rest idle. Labels follow the
// paper grammar: cI / cIJ / cIJK / cIJKL for one-qubit gates, cIJ / cIJ-KL
// for two-qubit gates, indices 1-based.
struct Configuration {
  std::string label;
  OpKind op_kind = OpKind::OneQubit;
  std::vector<std::vector<int>> operated;  // singleton or pair target sets, 0-based
  std::vector<int> idle;

  int parallelism() const { return static_cast<int>(operated.size()); }

  std::vector<int> operated_flat() const {
    std::vector<int> out;
    for (const auto& t : operated) out.insert(out.end(), t.begin(), t.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  bool contains_qubit(int q) const {
    auto f = operated_flat();
    return std::find(f.begin(), f.end(), q) != f.end();
  }
};

namespace detail {

inline std::vector<std::vector<int>> canonical_targets(std::vector<std::vector<int>> targets) {
  for (auto& t : targets) std::sort(t.begin(), t.end());
  std::sort(targets.begin(), targets.end());
  return targets;
}

}  // namespace detail

inline std::string format_label(const std::vector<std::vector<int>>& targets, OpKind op_kind) {
  auto canon = detail::canonical_targets(targets);
  std::string label = "c";
  if (op_kind == OpKind::OneQubit) {
    std::vector<int> flat;
    for (const auto& t : canon) flat.insert(flat.end(), t.begin(), t.end());
    std::sort(flat.begin(), flat.end());
    for (int q : flat) label += std::to_string(q + 1);
  } else {
    for (size_t k = 0; k < canon.size(); ++k) {
      if (k > 0) label += '-';
      for (int q : canon[k]) label += std::to_string(q + 1);
    }
  }
  return label;
}

inline std::vector<std::vector<int>> parse_label(const std::string& label, OpKind op_kind) {
  if (label.size() < 2 || label[0] != 'c')
    throw std::invalid_argument("bad configuration label: " + label);
  std::vector<std::vector<int>> targets;
  std::vector<int> current;
  std::set<int> seen;
  for (size_t k = 1; k < label.size(); ++k) {
    char ch = label[k];
    if (ch == '-') {
      if (op_kind != OpKind::TwoQubit || current.size() != 2)
        throw std::invalid_argument("bad configuration label: " + label);
      targets.push_back(current);
      current.clear();
      continue;
    }
    if (ch < '1' || ch > '0' + kNumQubits)
      throw std::invalid_argument("bad index in label: " + label);
    int q = ch - '1';
    if (!seen.insert(q).second)
      throw std::invalid_argument("repeated index in label: " + label);
    current.push_back(q);
  }
  if (current.empty()) throw std::invalid_argument("bad configuration label: " + label);
  if (op_kind == OpKind::OneQubit) {
    for (int q : current) targets.push_back({q});
  } else {
    if (current.size() != 2) throw std::invalid_argument("two-qubit label needs index pairs: " + label);
    targets.push_back(current);
  }
  return targets;
}

inline Configuration make_configuration(const ArrayGeometry& geometry,
                                        OpKind op_kind,
                                        std::vector<std::vector<int>> targets) {
  targets = detail::canonical_targets(targets);
  std::set<int> seen;
  for (const auto& t : targets) {
    size_t expect = op_kind == OpKind::OneQubit ? 1 : 2;
    if (t.size() != expect) throw std::invalid_argument("configuration: wrong target size");
    for (int q : t) {
      if (q < 0 || q >= kNumQubits) throw std::invalid_argument("configuration: index out of range");
      if (!seen.insert(q).second) throw std::invalid_argument("configuration: repeated index");
    }
    if (op_kind == OpKind::TwoQubit) {
      double r = distance(geometry.positions[t[0]], geometry.positions[t[1]]);
      if (std::abs(r - geometry.r0_m) > 1e-9 * geometry.r0_m)
        throw std::invalid_argument("configuration: two-qubit target pair not at distance r0");
    }
  }
  Configuration c;
  c.op_kind = op_kind;
  c.operated = targets;
  c.label = format_label(targets, op_kind);
  for (int q = 0; q < kNumQubits; ++q)
    if (!seen.count(q)) c.idle.push_back(q);
  return c;
}

namespace detail {

inline std::vector<std::vector<int>> apply_permutation(
    const std::vector<std::vector<int>>& targets, const std::array<int, kNumQubits>& perm) {
  std::vector<std::vector<int>> out = targets;
  for (auto& t : out)
    for (int& q : t) q = perm[q];
  return canonical_targets(out);
}

// All index-valid target lists for the given kind and parallelism; two-qubit
// targets are restricted to pairs at distance r0.
inline std::vector<std::vector<std::vector<int>>> candidate_targets(
    const ArrayGeometry& geometry, OpKind op_kind, int parallelism) {
  std::vector<std::vector<std::vector<int>>> out;
  if (op_kind == OpKind::OneQubit) {
    for (int mask = 1; mask < (1 << kNumQubits); ++mask) {
      if (__builtin_popcount(static_cast<unsigned>(mask)) != parallelism) continue;
      std::vector<std::vector<int>> targets;
      for (int q = 0; q < kNumQubits; ++q)
        if (mask & (1 << q)) targets.push_back({q});
      out.push_back(targets);
    }
    return out;
  }
  std::vector<std::vector<int>> r0_pairs;
  for (const auto& p : all_pairs(geometry))
    if (std::abs(p.r_m - geometry.r0_m) <= 1e-9 * geometry.r0_m)
      r0_pairs.push_back({p.i, p.j});
  if (parallelism == 1) {
    for (const auto& p : r0_pairs) out.push_back({p});
  } else {
    for (size_t a = 0; a < r0_pairs.size(); ++a)
      for (size_t b = a + 1; b < r0_pairs.size(); ++b) {
        std::set<int> qs(r0_pairs[a].begin(), r0_pairs[a].end());
        bool disjoint = true;
        for (int q : r0_pairs[b])
          if (qs.count(q)) disjoint = false;
        if (disjoint) out.push_back(canonical_targets({r0_pairs[a], r0_pairs[b]}));
      }
  }
  return out;
}

}  // namespace detail

// One canonical representative per orbit of the geometry's point group.
// Representatives carry the lexicographically smallest label of their orbit,
// which reproduces the labels used throughout the paper's figures.
inline std::vector<Configuration> enumerate_configurations(const ArrayGeometry& geometry,
                                                           OpKind op_kind,
                                                           int parallelism) {
  const int max_par = op_kind == OpKind::OneQubit ? 4 : 2;
  if (parallelism < 1 || parallelism > max_par)
    throw std::invalid_argument("enumerate_configurations: invalid parallelism " +
                                std::to_string(parallelism));
  auto group = symmetry_permutations(geometry);
  std::set<std::string> reps;
  for (const auto& candidate : detail::candidate_targets(geometry, op_kind, parallelism)) {
    std::string best;
    for (const auto& perm : group) {
      std::string label = format_label(detail::apply_permutation(candidate, perm), op_kind);
      if (best.empty() || label < best) best = label;
    }
    reps.insert(best);
  }
  std::vector<Configuration> out;
  for (const auto& label : reps)
    out.push_back(make_configuration(geometry, op_kind, parse_label(label, op_kind)));
  return out;
}

inline io::KeyValueFile serialize_configuration(const Configuration& c) {
  io::KeyValueFile kv;
  kv.set("label", c.label);
  kv.set("op_kind", to_string(c.op_kind));
  std::string idle;
  for (size_t k = 0; k < c.idle.size(); ++k) {
    if (k) idle += ", ";
    idle += std::to_string(c.idle[k] + 1);
  }
  kv.set("idle", idle.empty() ? "none" : idle);
  return kv;
}

}  // namespace ffq
