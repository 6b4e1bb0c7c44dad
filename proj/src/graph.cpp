#include "kfollow/graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace kfollow {

Graph::Graph(std::size_t vertex_count) {
  adjacency_.resize(vertex_count);
  labels_.reserve(vertex_count);
  for (std::size_t i = 0; i < vertex_count; ++i) {
    labels_.push_back(std::to_string(i));
    ids_.emplace(labels_.back(), static_cast<Vertex>(i));
  }
}

bool Graph::has_edge(Vertex u, Vertex v) const {
  check(u);
  check(v);
  const auto& adj = adjacency_[u];
  return std::binary_search(adj.begin(), adj.end(), v);
}

bool Graph::insert_edge(Vertex u, Vertex v) {
  check(u);
  check(v);
  if (u == v) return false;
  auto& au = adjacency_[u];
  auto it = std::lower_bound(au.begin(), au.end(), v);
  if (it != au.end() && *it == v) return false;
  au.insert(it, v);
  auto& av = adjacency_[v];
  av.insert(std::lower_bound(av.begin(), av.end(), u), u);
  ++edge_count_;
  return true;
}

bool Graph::remove_edge(Vertex u, Vertex v) {
  check(u);
  check(v);
  auto& au = adjacency_[u];
  auto it = std::lower_bound(au.begin(), au.end(), v);
  if (it == au.end() || *it != v) return false;
  au.erase(it);
  auto& av = adjacency_[v];
  av.erase(std::lower_bound(av.begin(), av.end(), u));
  --edge_count_;
  return true;
}

Vertex Graph::add_vertex(std::string label) {
  auto id = static_cast<Vertex>(adjacency_.size());
  if (label.empty()) label = std::to_string(id);
  if (ids_.contains(label)) {
    throw std::invalid_argument("duplicate vertex label '" + label + "'");
  }
  adjacency_.emplace_back();
  ids_.emplace(label, id);
  labels_.push_back(std::move(label));
  return id;
}

Vertex Graph::find(std::string_view label) const {
  auto it = ids_.find(std::string(label));
  return it == ids_.end() ? static_cast<Vertex>(adjacency_.size()) : it->second;
}

Vertex Graph::intern(std::string_view label) {
  Vertex id = find(label);
  if (id < adjacency_.size()) return id;
  return add_vertex(std::string(label));
}

bool Graph::check_invariants() const {
  std::size_t degree_sum = 0;
  for (Vertex u = 0; u < adjacency_.size(); ++u) {
    const auto& adj = adjacency_[u];
    if (!std::is_sorted(adj.begin(), adj.end())) return false;
    if (std::adjacent_find(adj.begin(), adj.end()) != adj.end()) return false;
    for (Vertex v : adj) {
      if (v == u || v >= adjacency_.size()) return false;
      const auto& back = adjacency_[v];
      if (!std::binary_search(back.begin(), back.end(), u)) return false;
    }
    degree_sum += adj.size();
  }
  return degree_sum == 2 * edge_count_ && labels_.size() == adjacency_.size();
}

void Graph::insert_edges(std::span<const std::pair<Vertex, Vertex>> edges) {
  for (auto [u, v] : edges) {
    check(u);
    check(v);
    if (u == v) continue;
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
  }
  std::size_t degree_sum = 0;
  for (auto& adj : adjacency_) {
    std::sort(adj.begin(), adj.end());
    adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    degree_sum += adj.size();
  }
  edge_count_ = degree_sum / 2;
}

std::vector<std::pair<Vertex, Vertex>> Graph::edges() const {
  std::vector<std::pair<Vertex, Vertex>> out;
  out.reserve(edge_count_);
  for (Vertex u = 0; u < adjacency_.size(); ++u) {
    for (Vertex v : adjacency_[u]) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

Graph load_edge_list(std::istream& in) {
  Graph g;
  std::string line;
  std::size_t line_no = 0;
  // Buffer edges and build adjacency at the end: inserting into sorted
  // vectors one by one is quadratic on hubs.
  std::vector<std::pair<Vertex, Vertex>> pending;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a)) continue;  // blank
    if (a.front() == '#' || a.front() == '%') continue;
    if (!(fields >> b) || (fields >> extra)) {
      throw ParseError(line_no, "expected exactly two vertex labels");
    }
    Vertex u = g.intern(a);
    Vertex v = g.intern(b);
    if (u != v) pending.emplace_back(std::min(u, v), std::max(u, v));
  }
  g.insert_edges(pending);
  return g;
}

Graph load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return load_edge_list(in);
}

}  // namespace kfollow
