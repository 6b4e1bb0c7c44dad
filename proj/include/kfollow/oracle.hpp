#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kfollow/graph.hpp"

// Definition-level reference implementations. Deliberately slow and share
// nothing with the engine beyond reading Graph adjacency.
namespace kfollow::oracle {

/// Literal peel: for k = 1, 2, ... repeatedly scan for any remaining vertex
/// of degree < k and delete it with coreness k - 1.
std::vector<std::uint32_t> coreness(const Graph& g);

/// Coreness with one vertex collapsed (degree treated as zero, so it is
/// removed with its edges first) or anchored (never deleted). The entry for
/// the modified vertex itself is meaningless.
std::vector<std::uint32_t> coreness_collapsing(const Graph& g, Vertex x);
std::vector<std::uint32_t> coreness_anchoring(const Graph& g, Vertex x);

std::vector<Vertex> collapsed_followers(const Graph& g, Vertex x);
std::vector<Vertex> anchored_followers(const Graph& g, Vertex x);

struct OracleResult {
  std::vector<std::uint32_t> coreness;
  std::vector<std::vector<Vertex>> collapsed_followers;
  std::vector<std::vector<Vertex>> anchored_followers;
};

/// Full per-vertex sweep. Intended for n up to about 2000.
OracleResult sweep(const Graph& g);

}  // namespace kfollow::oracle
