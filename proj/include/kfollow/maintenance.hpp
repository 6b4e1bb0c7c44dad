#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kfollow/core_decomp.hpp"
#include "kfollow/followers.hpp"
#include "kfollow/graph.hpp"
#include "kfollow/shell_index.hpp"

namespace kfollow {

enum class EdgeOp { kInsert, kRemove };

/// How coreness is brought up to date after an edge event. kTraversal
/// re-peels only the equal-coreness region around the edge; kRecompute runs
/// a full decomposition. Both must leave identical state.
enum class CoreMaintenance { kTraversal, kRecompute };

struct CorenessChange {
  Vertex vertex;
  Coreness before;
  Coreness after;

  friend bool operator==(const CorenessChange&, const CorenessChange&) = default;
};

struct UpdateReport {
  Vertex u = 0;
  Vertex v = 0;
  EdgeOp op = EdgeOp::kInsert;
  bool applied = false;  // false: the edge event was a no-op
  std::vector<CorenessChange> coreness_changed;  // sorted by vertex
  std::vector<ComponentId> retired_components;
  std::vector<ComponentId> new_components;
  std::vector<ComponentId> recomputed_components;  // superset of new
  std::size_t updated_follower_vertices = 0;
};

/// Updates state.coreness after g has already been mutated by (u, v, op),
/// and refreshes higher_support for the endpoints, every changed vertex and
/// their neighbors. Layers are left to maintain_followers. Returns the
/// changed vertices, sorted. support_changed, if given, receives the
/// vertices whose higher_support moved, sorted.
std::vector<CorenessChange> maintain_coreness(
    const Graph& g, CorenessState& state, Vertex u, Vertex v, EdgeOp op,
    CoreMaintenance mode = CoreMaintenance::kTraversal,
    std::vector<Vertex>* support_changed = nullptr);

/// Rebuilds the shell components around the edge and around every coreness
/// change; a rebuilt component with an unchanged member set keeps its id.
/// Refreshes candidate sets and layers next to the changes, reruns only the
/// follower searches that read a changed vertex, and refreshes the
/// aggregated sets of every candidate whose entries moved.
UpdateReport maintain_followers(const Graph& g, CorenessState& state,
                                ShellIndex& index, FollowerStore& store,
                                Vertex u, Vertex v, EdgeOp op,
                                std::span<const CorenessChange> changes,
                                std::span<const Vertex> support_changed,
                                const ParallelOptions& parallel = {});

struct EngineOptions {
  ParallelOptions parallel;
  CoreMaintenance core_maintenance = CoreMaintenance::kTraversal;
};

/// Owns a graph and all derived state; keeps it equal to the offline
/// pipeline under single-edge events.
class Engine {
 public:
  explicit Engine(Graph g, EngineOptions options = {});

  const Graph& graph() const noexcept { return graph_; }
  const CorenessState& state() const noexcept { return state_; }
  const ShellIndex& index() const noexcept { return index_; }
  const FollowerStore& store() const noexcept { return store_; }
  const EngineOptions& options() const noexcept { return options_; }

  UpdateReport apply(EdgeOp op, Vertex u, Vertex v);
  UpdateReport insert_edge(Vertex u, Vertex v) {
    return apply(EdgeOp::kInsert, u, v);
  }
  UpdateReport remove_edge(Vertex u, Vertex v) {
    return apply(EdgeOp::kRemove, u, v);
  }

  /// Appends an isolated vertex (coreness 0, its own singleton component).
  Vertex add_vertex(std::string label = {});

  std::pair<const std::vector<Vertex>&, const std::vector<Vertex>&>
  followers_of(Vertex x) const {
    return store_.followers_of(x);
  }

 private:
  Graph graph_;
  EngineOptions options_;
  CorenessState state_;
  ShellIndex index_;
  FollowerStore store_;
};

}  // namespace kfollow
