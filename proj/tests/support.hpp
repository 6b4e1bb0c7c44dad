#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "kfollow/core_decomp.hpp"
#include "kfollow/followers.hpp"
#include "kfollow/graph.hpp"
#include "kfollow/maintenance.hpp"
#include "kfollow/oracle.hpp"
#include "kfollow/shell_index.hpp"

namespace kfollow::testing {

inline Graph parse(const std::string& text) {
  std::istringstream in(text);
  return load_edge_list(in);
}

// Hand fixtures. Labels are single letters, declared in order a, b, c, ...
inline Graph triangle() { return parse("a b\nb c\na c\n"); }
inline Graph path3() { return parse("a b\nb c\n"); }
inline Graph triangle_pendant() { return parse("a b\nb c\na c\na d\n"); }
inline Graph k4_minus_cd() { return parse("a b\na c\na d\nb c\nb d\n"); }
inline Graph k4() { return parse("a b\na c\na d\nb c\nb d\nc d\n"); }
inline Graph cycle5() { return parse("a b\nb c\nc d\nd e\ne a\n"); }
inline Graph star5() { return parse("o a\no b\no c\no d\no e\n"); }
inline Graph two_triangles() { return parse("a b\nb c\na c\nd e\ne f\nd f\n"); }
inline Graph with_isolated() { return parse("a b\nb c\na c\nz z\n"); }

inline Vertex id(const Graph& g, const std::string& label) {
  Vertex v = g.find(label);
  if (v >= g.vertex_count()) throw std::out_of_range("no label " + label);
  return v;
}

inline std::set<std::string> labels(const Graph& g, const std::vector<Vertex>& vs) {
  std::set<std::string> out;
  for (Vertex v : vs) out.insert(g.label(v));
  return out;
}

using LabelSet = std::set<std::string>;

/// Layer values straight from the batch definition: for each k, start from
/// the oracle k-core and repeatedly strip every vertex of degree < k + 1 in
/// the remaining subgraph; vertices of the k-shell get their batch index.
inline std::vector<std::uint32_t> oracle_layers(const Graph& g) {
  const auto core = oracle::coreness(g);
  const std::size_t n = g.vertex_count();
  std::vector<std::uint32_t> layer(n, 0);
  std::uint32_t k_max = 0;
  for (auto c : core) k_max = std::max(k_max, c);
  for (std::uint32_t k = 0; k <= k_max; ++k) {
    std::vector<bool> alive(n);
    for (Vertex u = 0; u < n; ++u) alive[u] = core[u] >= k;
    for (std::uint32_t batch = 1;; ++batch) {
      std::vector<Vertex> strip;
      for (Vertex u = 0; u < n; ++u) {
        if (!alive[u]) continue;
        std::uint32_t d = 0;
        for (Vertex v : g.neighbors(u)) d += alive[v];
        if (d < k + 1) strip.push_back(u);
      }
      if (strip.empty()) break;
      for (Vertex u : strip) {
        alive[u] = false;
        if (core[u] == k) layer[u] = batch;
      }
    }
  }
  return layer;
}

/// Derived state reduced to a label-free canonical form so that two runs
/// can be compared regardless of component ids.
struct CanonicalState {
  std::vector<Coreness> coreness;
  std::vector<std::uint32_t> layer;
  std::vector<std::uint32_t> higher_support;
  // (shell coreness, members, collapser candidates, anchor candidates)
  std::set<std::tuple<Coreness, std::vector<Vertex>, std::vector<Vertex>,
                      std::vector<Vertex>>>
      components;
  std::vector<std::vector<Vertex>> collapsed;
  std::vector<std::vector<Vertex>> anchored;

  friend bool operator==(const CanonicalState&, const CanonicalState&) = default;
};

inline CanonicalState canonical(const Graph& g, const CorenessState& state,
                                const ShellIndex& index,
                                const FollowerStore& store) {
  CanonicalState out;
  out.coreness = state.coreness;
  out.layer = state.layer;
  out.higher_support = state.higher_support;
  for (const auto& [id, c] : index.components()) {
    out.components.emplace(c.shell_coreness, c.members, c.collapser_candidates,
                           c.anchor_candidates);
  }
  for (Vertex u = 0; u < g.vertex_count(); ++u) {
    out.collapsed.push_back(store.collapsed_of(u));
    out.anchored.push_back(store.anchored_of(u));
  }
  return out;
}

inline CanonicalState canonical(const Engine& e) {
  return canonical(e.graph(), e.state(), e.index(), e.store());
}

inline CanonicalState offline_canonical(const Graph& g) {
  Engine fresh(g, EngineOptions{ParallelOptions{1}, CoreMaintenance::kTraversal});
  return canonical(fresh);
}

}  // namespace kfollow::testing
