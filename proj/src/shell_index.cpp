#include "kfollow/shell_index.hpp"

#include <algorithm>
#include <string>

namespace kfollow {

namespace {

void sort_unique(std::vector<Vertex>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

bool ShellComponent::contains(Vertex v) const {
  return std::binary_search(members.begin(), members.end(), v);
}

ComponentId ShellIndex::owner(Vertex v) const {
  if (v >= owner_.size()) {
    throw std::out_of_range("vertex id " + std::to_string(v) + " out of range");
  }
  return owner_[v];
}

const ShellComponent& ShellIndex::component_of(Vertex v) const {
  ComponentId id = owner(v);
  const ShellComponent* c = find(id);
  if (c == nullptr) {
    throw IndexConsistencyError("vertex " + std::to_string(v) +
                                " has no live shell component");
  }
  return *c;
}

const ShellComponent* ShellIndex::find(ComponentId id) const {
  auto it = components_.find(id);
  return it == components_.end() ? nullptr : &it->second;
}

ComponentId ShellIndex::insert(ShellComponent component) {
  ComponentId id = next_id_++;
  component.id = id;
  for (Vertex v : component.members) owner_.at(v) = id;
  components_.emplace(id, std::move(component));
  return id;
}

ShellComponent& ShellIndex::live(ComponentId id) {
  auto it = components_.find(id);
  if (it == components_.end()) {
    throw IndexConsistencyError("component " + std::to_string(id) + " is not live");
  }
  return it->second;
}

ShellComponent ShellIndex::take(ComponentId id) {
  ShellComponent out = std::move(live(id));
  components_.erase(id);
  for (Vertex v : out.members) {
    if (owner_[v] == id) owner_[v] = kNoComponent;
  }
  return out;
}

void ShellIndex::set_candidates(ComponentId id, std::vector<Vertex> collapser,
                                std::vector<Vertex> anchor) {
  ShellComponent& c = live(id);
  c.collapser_candidates = std::move(collapser);
  c.anchor_candidates = std::move(anchor);
}

void ShellIndex::add_internal_edge(ComponentId id, Vertex a, Vertex b) {
  auto& edges = live(id).internal_edges;
  std::pair e{std::min(a, b), std::max(a, b)};
  auto it = std::lower_bound(edges.begin(), edges.end(), e);
  if (it == edges.end() || *it != e) edges.insert(it, e);
}

void ShellIndex::remove_internal_edge(ComponentId id, Vertex a, Vertex b) {
  auto& edges = live(id).internal_edges;
  std::pair e{std::min(a, b), std::max(a, b)};
  auto it = std::lower_bound(edges.begin(), edges.end(), e);
  if (it != edges.end() && *it == e) edges.erase(it);
}

void ShellIndex::retire(ComponentId id) {
  auto it = components_.find(id);
  if (it == components_.end()) return;
  for (Vertex v : it->second.members) {
    if (owner_[v] == id) owner_[v] = kNoComponent;
  }
  components_.erase(it);
}

void ShellIndex::refresh_candidates(const Graph& g, const CorenessState& state,
                                    ComponentId id) {
  auto it = components_.find(id);
  if (it == components_.end()) {
    throw IndexConsistencyError("refresh of dead component " +
                                std::to_string(id));
  }
  fill_candidates(g, state, it->second);
}

void fill_candidates(const Graph& g, const CorenessState& state,
                     ShellComponent& component) {
  const Coreness k = component.shell_coreness;
  auto& up = component.collapser_candidates;
  auto& down = component.anchor_candidates;
  up.assign(component.members.begin(), component.members.end());
  down.assign(component.members.begin(), component.members.end());
  for (Vertex u : component.members) {
    for (Vertex v : g.neighbors(u)) {
      if (state.coreness[v] > k) {
        up.push_back(v);
      } else if (state.coreness[v] < k) {
        down.push_back(v);
      }
    }
  }
  sort_unique(up);
  sort_unique(down);
}

ShellComponent flood_shell_component(const Graph& g, const CorenessState& state,
                                     Vertex seed, std::vector<char>& visited) {
  ShellComponent component;
  const Coreness k = state.coreness[seed];
  component.shell_coreness = k;
  std::vector<Vertex> stack{seed};
  visited[seed] = 1;
  while (!stack.empty()) {
    Vertex u = stack.back();
    stack.pop_back();
    component.members.push_back(u);
    for (Vertex v : g.neighbors(u)) {
      Coreness cv = state.coreness[v];
      if (cv > k) {
        component.collapser_candidates.push_back(v);
      } else if (cv < k) {
        component.anchor_candidates.push_back(v);
      } else {
        if (u < v) component.internal_edges.emplace_back(u, v);
        if (!visited[v]) {
          visited[v] = 1;
          stack.push_back(v);
        }
      }
    }
  }
  sort_unique(component.members);
  std::sort(component.internal_edges.begin(), component.internal_edges.end());
  auto& up = component.collapser_candidates;
  auto& down = component.anchor_candidates;
  up.insert(up.end(), component.members.begin(), component.members.end());
  down.insert(down.end(), component.members.begin(), component.members.end());
  sort_unique(up);
  sort_unique(down);
  return component;
}

ShellIndex shell_decompose(const Graph& g, const CorenessState& state) {
  const std::size_t n = g.vertex_count();
  ShellIndex index(n);
  std::vector<char> visited(n, 0);
  for (Vertex u = 0; u < n; ++u) {
    if (!visited[u]) index.insert(flood_shell_component(g, state, u, visited));
  }
  return index;
}

std::vector<std::uint32_t> compute_layers(const Graph& g,
                                          const ShellComponent& component,
                                          const CorenessState& state) {
  return compute_layers(g, component.members, component.shell_coreness, state);
}

}  // namespace kfollow
