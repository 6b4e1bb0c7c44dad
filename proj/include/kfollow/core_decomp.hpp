#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kfollow/graph.hpp"

namespace kfollow {

using Coreness = std::uint32_t;

/// Per-vertex coreness, layer value and higher coreness support.
///
/// layer[u] is the index (1-based) of the deletion batch that removed u
/// during the peeling stage k = coreness[u], where batch i removes every
/// remaining vertex whose degree in the remaining k-core is below k + 1.
/// higher_support[u] counts neighbors with strictly larger coreness.
struct CorenessState {
  std::vector<Coreness> coreness;
  std::vector<std::uint32_t> layer;
  std::vector<std::uint32_t> higher_support;

  std::size_t size() const noexcept { return coreness.size(); }
  Coreness max_coreness() const;

  friend bool operator==(const CorenessState&, const CorenessState&) = default;
};

struct PeelOptions {
  /// When set, every deletion batch is processed in a shuffled order.
  /// Results must not depend on it; tests use it to check that.
  std::optional<std::uint64_t> shuffle_seed;
};

struct PeelCounters {
  std::size_t vertex_pops = 0;
  std::size_t edge_visits = 0;
};

/// Batch bucket peeling in O(n + m). The graph is not modified.
CorenessState core_decompose(const Graph& g, const PeelOptions& options = {},
                             PeelCounters* counters = nullptr);

/// Recounts higher_support[u] from the current coreness values.
std::uint32_t count_higher_support(const Graph& g,
                                   std::span<const Coreness> coreness,
                                   Vertex u);

/// {u : c(u) >= k}, ascending.
std::vector<Vertex> k_core_membership(const CorenessState& state, Coreness k);

/// Batch-peels one shell component. members are the component's vertices,
/// all with coreness shell_coreness; available degree of v is
/// higher_support[v] plus its undeleted neighbors inside the component.
/// Returns the layer of members[i] at index i.
std::vector<std::uint32_t> compute_layers(const Graph& g,
                                          std::span<const Vertex> members,
                                          Coreness shell_coreness,
                                          const CorenessState& state);

}  // namespace kfollow
