#include "kfollow/core_decomp.hpp"

#include <algorithm>
#include <random>
#include <unordered_map>

namespace kfollow {

Coreness CorenessState::max_coreness() const {
  Coreness best = 0;
  for (Coreness c : coreness) best = std::max(best, c);
  return best;
}

CorenessState core_decompose(const Graph& g, const PeelOptions& options,
                             PeelCounters* counters) {
  const std::size_t n = g.vertex_count();
  CorenessState state;
  state.coreness.assign(n, 0);
  state.layer.assign(n, 0);
  state.higher_support.assign(n, 0);
  if (n == 0) return state;

  PeelCounters local;
  std::vector<std::uint32_t> degree(n);
  std::size_t max_degree = 0;
  for (Vertex u = 0; u < n; ++u) {
    degree[u] = static_cast<std::uint32_t>(g.degree(u));
    max_degree = std::max<std::size_t>(max_degree, degree[u]);
  }

  // Lazy buckets: an entry (v in bucket d) is live iff v is not removed and
  // degree[v] == d. A vertex is filed at most once per degree value it takes
  // while above the current stage, so total entries stay O(n + m).
  std::vector<std::vector<Vertex>> buckets(max_degree + 1);
  for (Vertex u = 0; u < n; ++u) buckets[degree[u]].push_back(u);

  std::vector<char> removed(n, 0);
  std::optional<std::mt19937_64> rng;
  if (options.shuffle_seed) rng.emplace(*options.shuffle_seed);

  std::size_t remaining = n;
  std::vector<Vertex> frontier, next;
  for (std::uint32_t k = 0; remaining > 0; ++k) {
    frontier.clear();
    if (k < buckets.size()) {
      for (Vertex v : buckets[k]) {
        if (!removed[v] && degree[v] == k) frontier.push_back(v);
      }
      buckets[k].clear();
      buckets[k].shrink_to_fit();
    }
    for (std::uint32_t batch = 1; !frontier.empty(); ++batch) {
      if (rng) std::shuffle(frontier.begin(), frontier.end(), *rng);
      for (Vertex u : frontier) {
        removed[u] = 1;
        state.coreness[u] = k;
        state.layer[u] = batch;
      }
      remaining -= frontier.size();
      next.clear();
      for (Vertex u : frontier) {
        ++local.vertex_pops;
        for (Vertex v : g.neighbors(u)) {
          ++local.edge_visits;
          if (removed[v]) continue;
          std::uint32_t d = --degree[v];
          if (d == k) {
            next.push_back(v);
          } else if (d > k) {
            buckets[d].push_back(v);
          }
        }
      }
      std::swap(frontier, next);
    }
  }

  for (Vertex u = 0; u < n; ++u) {
    state.higher_support[u] = count_higher_support(g, state.coreness, u);
  }
  if (counters) *counters = local;
  return state;
}

std::uint32_t count_higher_support(const Graph& g,
                                   std::span<const Coreness> coreness,
                                   Vertex u) {
  std::uint32_t count = 0;
  for (Vertex v : g.neighbors(u)) count += coreness[v] > coreness[u];
  return count;
}

std::vector<Vertex> k_core_membership(const CorenessState& state, Coreness k) {
  std::vector<Vertex> out;
  for (Vertex u = 0; u < state.size(); ++u) {
    if (state.coreness[u] >= k) out.push_back(u);
  }
  return out;
}

std::vector<std::uint32_t> compute_layers(const Graph& g,
                                          std::span<const Vertex> members,
                                          Coreness shell_coreness,
                                          const CorenessState& state) {
  const std::size_t size = members.size();
  std::unordered_map<Vertex, std::uint32_t> slot;
  slot.reserve(size * 2);
  for (std::uint32_t i = 0; i < size; ++i) slot.emplace(members[i], i);

  // Equal-coreness neighbors always share the component, so "inside the
  // component" is just a coreness comparison.
  std::vector<std::uint32_t> available(size);
  for (std::uint32_t i = 0; i < size; ++i) {
    Vertex u = members[i];
    std::uint32_t inside = 0;
    for (Vertex v : g.neighbors(u)) inside += state.coreness[v] == shell_coreness;
    available[i] = state.higher_support[u] + inside;
  }

  std::vector<std::uint32_t> layer(size, 0);
  std::vector<std::uint32_t> frontier, next;
  for (std::uint32_t i = 0; i < size; ++i) {
    if (available[i] < shell_coreness + 1) frontier.push_back(i);
  }
  for (std::uint32_t batch = 1; !frontier.empty(); ++batch) {
    for (std::uint32_t i : frontier) layer[i] = batch;
    next.clear();
    for (std::uint32_t i : frontier) {
      for (Vertex v : g.neighbors(members[i])) {
        if (state.coreness[v] != shell_coreness) continue;
        std::uint32_t j = slot.at(v);
        if (layer[j] != 0) continue;
        if (--available[j] == shell_coreness) next.push_back(j);
      }
    }
    std::swap(frontier, next);
  }
  return layer;
}

}  // namespace kfollow
