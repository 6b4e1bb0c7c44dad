#include "kfollow/oracle.hpp"

#include <limits>

namespace kfollow::oracle {

namespace {

enum class Role { kNormal, kCollapsed, kAnchored };

std::vector<std::uint32_t> peel(const Graph& g, std::optional<Vertex> special,
                                Role role) {
  const std::size_t n = g.vertex_count();
  std::vector<std::vector<Vertex>> adj(n);
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v : g.neighbors(u)) adj[u].push_back(v);
  }
  if (special && role == Role::kCollapsed) {
    // Degree zero: the vertex is gone before anything else is looked at.
    for (Vertex v : adj[*special]) {
      std::erase(adj[v], *special);
    }
    adj[*special].clear();
  }

  std::vector<std::uint32_t> core(n, 0);
  std::vector<bool> alive(n, true);
  std::vector<std::size_t> deg(n);
  for (Vertex u = 0; u < n; ++u) deg[u] = adj[u].size();
  auto effective = [&](Vertex u) {
    if (special && *special == u && role == Role::kAnchored) {
      return std::numeric_limits<std::size_t>::max();
    }
    return deg[u];
  };
  auto anyone_alive = [&] {
    for (Vertex u = 0; u < n; ++u) {
      if (alive[u] && !(special && *special == u && role == Role::kAnchored)) {
        return true;
      }
    }
    return false;
  };

  for (std::uint32_t k = 1; anyone_alive(); ++k) {
    bool removed = true;
    while (removed) {
      removed = false;
      for (Vertex u = 0; u < n; ++u) {
        if (!alive[u] || effective(u) >= k) continue;
        for (Vertex v : adj[u]) {
          if (alive[v]) --deg[v];
        }
        alive[u] = false;
        core[u] = k - 1;
        removed = true;
      }
    }
  }
  return core;
}

std::vector<Vertex> diff(const std::vector<std::uint32_t>& before,
                         const std::vector<std::uint32_t>& after, Vertex x,
                         bool want_drop) {
  std::vector<Vertex> out;
  for (Vertex u = 0; u < before.size(); ++u) {
    if (u == x) continue;
    if (want_drop ? after[u] < before[u] : after[u] > before[u]) out.push_back(u);
  }
  return out;
}

}  // namespace

std::vector<std::uint32_t> coreness(const Graph& g) {
  return peel(g, std::nullopt, Role::kNormal);
}

std::vector<std::uint32_t> coreness_collapsing(const Graph& g, Vertex x) {
  return peel(g, x, Role::kCollapsed);
}

std::vector<std::uint32_t> coreness_anchoring(const Graph& g, Vertex x) {
  return peel(g, x, Role::kAnchored);
}

std::vector<Vertex> collapsed_followers(const Graph& g, Vertex x) {
  return diff(coreness(g), coreness_collapsing(g, x), x, true);
}

std::vector<Vertex> anchored_followers(const Graph& g, Vertex x) {
  return diff(coreness(g), coreness_anchoring(g, x), x, false);
}

OracleResult sweep(const Graph& g) {
  OracleResult r;
  r.coreness = coreness(g);
  const std::size_t n = g.vertex_count();
  r.collapsed_followers.resize(n);
  r.anchored_followers.resize(n);
  for (Vertex x = 0; x < n; ++x) {
    r.collapsed_followers[x] = diff(r.coreness, coreness_collapsing(g, x), x, true);
    r.anchored_followers[x] = diff(r.coreness, coreness_anchoring(g, x), x, false);
  }
  return r;
}

}  // namespace kfollow::oracle
