#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace kfollow {

using Vertex = std::uint32_t;

/// Thrown by load_edge_list on a malformed line. line() is 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Undirected simple graph over dense ids 0..n-1.
///
/// Each adjacency list is kept sorted and duplicate-free, so membership is a
/// binary search and iteration order is deterministic. External labels are
/// only consulted at the I/O boundary.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t vertex_count);

  std::size_t vertex_count() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }

  std::span<const Vertex> neighbors(Vertex u) const {
    check(u);
    return adjacency_[u];
  }
  std::size_t degree(Vertex u) const { return neighbors(u).size(); }
  bool has_edge(Vertex u, Vertex v) const;

  /// Returns false for self-loops and edges already present.
  bool insert_edge(Vertex u, Vertex v);
  /// Returns false if the edge was absent.
  bool remove_edge(Vertex u, Vertex v);

  /// Bulk insertion; self-loops and duplicates (including edges already
  /// present) are dropped. Cheaper than repeated insert_edge on hubs.
  void insert_edges(std::span<const std::pair<Vertex, Vertex>> edges);

  /// Appends an isolated vertex. When label is empty the decimal id is used.
  Vertex add_vertex(std::string label = {});

  const std::string& label(Vertex u) const {
    check(u);
    return labels_[u];
  }
  /// Returns vertex_count() when the label is unknown.
  Vertex find(std::string_view label) const;
  /// Returns the id of label, creating an isolated vertex if needed.
  Vertex intern(std::string_view label);

  /// Full scan of symmetry, set-ness, self-loops and the edge counter.
  bool check_invariants() const;

  std::vector<std::pair<Vertex, Vertex>> edges() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.adjacency_ == b.adjacency_;
  }

 private:
  void check(Vertex u) const {
    if (u >= adjacency_.size()) {
      throw std::out_of_range("vertex id " + std::to_string(u) +
                              " out of range (n=" +
                              std::to_string(adjacency_.size()) + ")");
    }
  }

  std::vector<std::vector<Vertex>> adjacency_;
  std::size_t edge_count_ = 0;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Vertex> ids_;
};

/// Parses a SNAP-style edge list: one edge per line, two whitespace
/// separated labels, '#' comment lines and blank lines ignored. Labels are
/// mapped to ids in first-appearance order; self-loops declare the vertex
/// but add no edge; duplicates collapse.
Graph load_edge_list(std::istream& in);
Graph load_edge_list_file(const std::string& path);

}  // namespace kfollow
