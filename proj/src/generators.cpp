#include "kfollow/generators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>
#include <utility>
#include <vector>

namespace kfollow::generators {

Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  Graph g(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = u + 1; v < n; ++v) {
      if (coin(rng) < p) edges.emplace_back(u, v);
    }
  }
  g.insert_edges(edges);
  return g;
}

Graph uniform_edges(std::size_t n, std::size_t m, std::uint64_t seed) {
  Graph g(n);
  if (n < 2) return g;
  m = std::min(m, n * (n - 1) / 2);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Vertex> pick(0, static_cast<Vertex>(n - 1));
  std::unordered_set<std::uint64_t> seen;
  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(m);
  while (edges.size() < m) {
    Vertex u = pick(rng), v = pick(rng);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (seen.insert((static_cast<std::uint64_t>(u) << 32) | v).second) {
      edges.emplace_back(u, v);
    }
  }
  g.insert_edges(edges);
  return g;
}

Graph chung_lu(std::size_t n, double average_degree, double exponent,
               std::uint64_t seed) {
  Graph g(n);
  if (n < 2) return g;
  std::vector<double> weight(n);
  const double beta = 1.0 / (exponent - 1.0);
  // Offset keeps the largest expected degree around sqrt(n * d).
  const double i0 = 10.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    weight[i] = std::pow(static_cast<double>(i) + i0, -beta);
    total += weight[i];
  }
  const double scale = average_degree * static_cast<double>(n) / total;
  for (double& w : weight) w *= scale;
  const double sum = average_degree * static_cast<double>(n);

  // Draw m = sum / 2 endpoint pairs proportional to weight, then drop
  // self-loops and duplicates.
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> endpoint(weight.begin(), weight.end());
  const auto m = static_cast<std::size_t>(sum / 2.0);
  std::vector<std::pair<Vertex, Vertex>> edges;
  edges.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto u = static_cast<Vertex>(endpoint(rng));
    auto v = static_cast<Vertex>(endpoint(rng));
    edges.emplace_back(u, v);
  }
  // Shuffle ids so that hubs are not all at low ids.
  std::vector<Vertex> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<Vertex>(i);
  std::shuffle(perm.begin(), perm.end(), rng);
  for (auto& [u, v] : edges) {
    u = perm[u];
    v = perm[v];
  }
  g.insert_edges(edges);
  return g;
}

}  // namespace kfollow::generators
