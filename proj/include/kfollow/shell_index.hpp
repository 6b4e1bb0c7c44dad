#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kfollow/core_decomp.hpp"
#include "kfollow/graph.hpp"

namespace kfollow {

using ComponentId = std::uint64_t;
inline constexpr ComponentId kNoComponent = 0;

/// A maximal connected set of equal-coreness vertices, together with the
/// vertices whose collapse (collapser_candidates) or anchoring
/// (anchor_candidates) can change the coreness of any member.
struct ShellComponent {
  ComponentId id = kNoComponent;
  Coreness shell_coreness = 0;
  std::vector<Vertex> members;  // sorted
  std::vector<std::pair<Vertex, Vertex>> internal_edges;  // u < v
  // members plus adjacent vertices of higher coreness, sorted
  std::vector<Vertex> collapser_candidates;
  // members plus adjacent vertices of lower coreness, sorted
  std::vector<Vertex> anchor_candidates;

  bool contains(Vertex v) const;
};

class IndexConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Vertex -> shell component map plus the live components. Ids increase
/// monotonically and are never reused, so a retired id can never alias a
/// live component.
class ShellIndex {
 public:
  ShellIndex() = default;
  explicit ShellIndex(std::size_t vertex_count)
      : owner_(vertex_count, kNoComponent) {}

  std::size_t vertex_count() const noexcept { return owner_.size(); }
  ComponentId owner(Vertex v) const;
  const ShellComponent& component_of(Vertex v) const;
  const ShellComponent* find(ComponentId id) const;
  const std::map<ComponentId, ShellComponent>& components() const noexcept {
    return components_;
  }
  ComponentId next_id() const noexcept { return next_id_; }

  /// Assigns a fresh id, takes ownership of all members and returns the id.
  ComponentId insert(ShellComponent component);
  /// Retires a live component and hands it back.
  ShellComponent take(ComponentId id);
  /// Overwrites the candidate sets of a live component; both sorted.
  void set_candidates(ComponentId id, std::vector<Vertex> collapser,
                      std::vector<Vertex> anchor);
  /// Keeps internal_edges in step with an edge event between two members.
  void add_internal_edge(ComponentId id, Vertex a, Vertex b);
  void remove_internal_edge(ComponentId id, Vertex a, Vertex b);
  /// Drops a live component; its members become unassigned until another
  /// component claims them.
  void retire(ComponentId id);
  /// Recomputes the candidate sets of a live component from g and state.
  void refresh_candidates(const Graph& g, const CorenessState& state,
                          ComponentId id);
  /// Extends owner for a vertex appended to the graph (unassigned).
  void add_vertex() { owner_.push_back(kNoComponent); }

 private:
  ShellComponent& live(ComponentId id);

  std::vector<ComponentId> owner_;
  std::map<ComponentId, ShellComponent> components_;
  ComponentId next_id_ = 1;
};

/// Collects the component containing seed by an iterative flood fill over
/// equal-coreness edges. Every member gets visited[v] = 1; vertices already
/// marked are never entered. Candidate sets are filled in the same pass.
ShellComponent flood_shell_component(const Graph& g, const CorenessState& state,
                                     Vertex seed, std::vector<char>& visited);

/// Fills collapser_candidates / anchor_candidates from the members.
void fill_candidates(const Graph& g, const CorenessState& state,
                     ShellComponent& component);

/// Partitions all vertices into shell components.
ShellIndex shell_decompose(const Graph& g, const CorenessState& state);

/// Layers for one component, aligned with component.members.
std::vector<std::uint32_t> compute_layers(const Graph& g,
                                          const ShellComponent& component,
                                          const CorenessState& state);

}  // namespace kfollow
