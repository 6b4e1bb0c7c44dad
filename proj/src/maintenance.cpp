#include "kfollow/maintenance.hpp"

#include <algorithm>
#include <functional>
#include <iterator>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

namespace kfollow {

namespace {

// Local core maintenance. Only vertices at the smaller endpoint coreness k
// can move, and only those reachable from an endpoint through vertices that
// could still qualify.
class CoreWalk {
 public:
  CoreWalk(const Graph& g, const CorenessState& state, Coreness k)
      : g_(g), state_(state), k_(k) {}

  // Neighbours at coreness >= k.
  std::uint32_t max_core_degree(Vertex w) {
    auto [it, fresh] = mcd_.try_emplace(w, 0);
    if (fresh) {
      std::uint32_t count = 0;
      for (Vertex z : g_.neighbors(w)) count += state_.coreness[z] >= k_;
      it->second = count;
    }
    return it->second;
  }

  // Neighbours that are above k or could rise with w.
  std::uint32_t pure_core_degree(Vertex w) {
    std::uint32_t count = 0;
    for (Vertex z : g_.neighbors(w)) {
      Coreness c = state_.coreness[z];
      count += c > k_ || (c == k_ && max_core_degree(z) > k_);
    }
    return count;
  }

 private:
  const Graph& g_;
  const CorenessState& state_;
  Coreness k_;
  std::unordered_map<Vertex, std::uint32_t> mcd_;
};

std::vector<Vertex> rising_after_insert(const Graph& g, const CorenessState& state,
                                        std::span<const Vertex> roots, Coreness k) {
  CoreWalk walk(g, state, k);
  std::unordered_map<Vertex, std::uint32_t> degree;  // visited -> live count
  std::unordered_map<Vertex, char> evicted;
  std::vector<Vertex> stack(roots.begin(), roots.end());
  std::vector<Vertex> order;
  for (Vertex r : roots) degree.try_emplace(r, 0);
  while (!stack.empty()) {
    Vertex w = stack.back();
    stack.pop_back();
    order.push_back(w);
    std::uint32_t d = walk.pure_core_degree(w);
    degree[w] = d;
    if (d <= k) continue;
    for (Vertex z : g.neighbors(w)) {
      if (state.coreness[z] != k || degree.contains(z)) continue;
      if (walk.max_core_degree(z) <= k) continue;
      degree.emplace(z, 0);
      stack.push_back(z);
    }
  }

  std::vector<Vertex> queue;
  for (Vertex w : order) {
    if (degree[w] <= k) queue.push_back(w);
  }
  while (!queue.empty()) {
    Vertex w = queue.back();
    queue.pop_back();
    if (!evicted.emplace(w, 1).second) continue;
    // w was counted by its neighbours only if it could have risen.
    if (walk.max_core_degree(w) <= k) continue;
    for (Vertex z : g.neighbors(w)) {
      auto it = degree.find(z);
      if (it == degree.end() || evicted.contains(z)) continue;
      if (--it->second == k) queue.push_back(z);
    }
  }

  std::vector<Vertex> out;
  for (Vertex w : order) {
    if (!evicted.contains(w)) out.push_back(w);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Vertex> falling_after_remove(const Graph& g, const CorenessState& state,
                                         std::span<const Vertex> roots, Coreness k) {
  std::unordered_map<Vertex, std::uint32_t> degree;
  std::unordered_map<Vertex, char> dropped;
  auto degree_of = [&](Vertex w) -> std::uint32_t& {
    auto [it, fresh] = degree.try_emplace(w, 0);
    if (fresh) {
      std::uint32_t count = 0;
      for (Vertex z : g.neighbors(w)) {
        Coreness c = state.coreness[z];
        count += c > k || (c == k && !dropped.contains(z));
      }
      it->second = count;
    }
    return it->second;
  };
  std::vector<Vertex> queue;
  for (Vertex r : roots) {
    if (degree_of(r) < k) queue.push_back(r);
  }
  std::vector<Vertex> out;
  while (!queue.empty()) {
    Vertex w = queue.back();
    queue.pop_back();
    if (!dropped.emplace(w, 1).second) continue;
    out.push_back(w);
    for (Vertex z : g.neighbors(w)) {
      if (state.coreness[z] != k || dropped.contains(z)) continue;
      bool fresh = !degree.contains(z);
      std::uint32_t& d = degree_of(z);  // a fresh count already excludes w
      if (!fresh) --d;
      if (d < k) queue.push_back(z);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Vertex> traversal_changes(const Graph& g, const CorenessState& state,
                                      Vertex u, Vertex v, EdgeOp op) {
  const Coreness k = std::min(state.coreness[u], state.coreness[v]);
  std::vector<Vertex> roots;
  if (state.coreness[u] == k) roots.push_back(u);
  if (state.coreness[v] == k && v != u) roots.push_back(v);
  return op == EdgeOp::kInsert ? rising_after_insert(g, state, roots, k)
                               : falling_after_remove(g, state, roots, k);
}

void sort_unique(std::vector<Vertex>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

std::vector<CorenessChange> maintain_coreness(const Graph& g,
                                              CorenessState& state, Vertex u,
                                              Vertex v, EdgeOp op,
                                              CoreMaintenance mode,
                                              std::vector<Vertex>* support_changed) {
  std::vector<CorenessChange> changes;
  if (support_changed) support_changed->clear();
  if (mode == CoreMaintenance::kRecompute) {
    CorenessState fresh = core_decompose(g);
    for (Vertex w = 0; w < g.vertex_count(); ++w) {
      if (fresh.coreness[w] != state.coreness[w]) {
        changes.push_back({w, state.coreness[w], fresh.coreness[w]});
      }
      if (support_changed && fresh.higher_support[w] != state.higher_support[w]) {
        support_changed->push_back(w);
      }
    }
    state.coreness = std::move(fresh.coreness);
    state.higher_support = std::move(fresh.higher_support);
    return changes;
  }

  for (Vertex w : traversal_changes(g, state, u, v, op)) {
    Coreness before = state.coreness[w];
    Coreness after = op == EdgeOp::kInsert ? before + 1 : before - 1;
    changes.push_back({w, before, after});
  }
  for (const auto& c : changes) state.coreness[c.vertex] = c.after;

  std::vector<Vertex> touched{u, v};
  for (const auto& c : changes) {
    touched.push_back(c.vertex);
    for (Vertex z : g.neighbors(c.vertex)) touched.push_back(z);
  }
  sort_unique(touched);
  for (Vertex w : touched) {
    auto hs = count_higher_support(g, state.coreness, w);
    if (support_changed && hs != state.higher_support[w]) support_changed->push_back(w);
    state.higher_support[w] = hs;
  }
  return changes;
}

namespace {

struct Candidates {
  Coreness shell = 0;
  std::vector<Vertex> collapse;
  std::vector<Vertex> anchor;

  const std::vector<Vertex>& of(SearchKind kind) const {
    return kind == SearchKind::kCollapse ? collapse : anchor;
  }
};

Candidates candidates_of(const ShellComponent& c) {
  return {c.shell_coreness, c.collapser_candidates, c.anchor_candidates};
}

const std::vector<Vertex>& candidates_of(const ShellComponent& c, SearchKind kind) {
  return kind == SearchKind::kCollapse ? c.collapser_candidates : c.anchor_candidates;
}

constexpr SearchKind kKinds[] = {SearchKind::kCollapse, SearchKind::kAnchor};

bool contains(const std::vector<Vertex>& sorted, Vertex x) {
  return std::binary_search(sorted.begin(), sorted.end(), x);
}

struct LayerChange {
  Vertex vertex;
  std::uint32_t before;
  std::uint32_t after;
};

constexpr std::uint32_t kUnsettled = std::numeric_limits<std::uint32_t>::max() / 2;

// A vertex at coreness k is peeled in the first round r where its higher
// support plus the equal-coreness neighbours still present (layer >= r) is at
// most k.
std::uint32_t peel_round(const Graph& g, const CorenessState& state, Vertex w,
                         std::vector<std::uint32_t>& scratch) {
  const Coreness k = state.coreness[w];
  const std::size_t room = k - state.higher_support[w];
  scratch.clear();
  for (Vertex z : g.neighbors(w)) {
    if (state.coreness[z] == k) scratch.push_back(state.layer[z]);
  }
  if (scratch.size() <= room) return 1;
  std::nth_element(scratch.begin(), scratch.begin() + room, scratch.end(),
                   std::greater<>());
  return std::min(scratch[room] + 1, kUnsettled);
}

// Layers are the unique solution of the peel_round equation within each
// shell. An insertion only raises the right-hand side and a removal only
// lowers it, so iterating from the old values (with moved vertices starting
// at the bottom, or the top) reaches the new solution.
std::vector<LayerChange> settle_layers(const Graph& g, CorenessState& state,
                                       Vertex u, Vertex v, EdgeOp op,
                                       std::span<const CorenessChange> changes) {
  std::unordered_map<Vertex, std::uint32_t> original;
  std::vector<Vertex> work{u, v};
  for (const auto& c : changes) {
    original.emplace(c.vertex, state.layer[c.vertex]);
    state.layer[c.vertex] = op == EdgeOp::kInsert ? 1 : kUnsettled;
    work.push_back(c.vertex);
    for (Vertex z : g.neighbors(c.vertex)) work.push_back(z);
  }
  std::unordered_map<Vertex, char> queued;
  for (Vertex w : work) queued.emplace(w, 1);
  std::vector<std::uint32_t> scratch;
  while (!work.empty()) {
    Vertex w = work.back();
    work.pop_back();
    queued.erase(w);
    std::uint32_t next = peel_round(g, state, w, scratch);
    if (next == state.layer[w]) continue;
    original.try_emplace(w, state.layer[w]);
    state.layer[w] = next;
    for (Vertex z : g.neighbors(w)) {
      if (state.coreness[z] == state.coreness[w] && queued.emplace(z, 1).second) {
        work.push_back(z);
      }
    }
  }
  std::vector<LayerChange> out;
  for (const auto& [w, before] : original) {
    if (before != state.layer[w]) out.push_back({w, before, state.layer[w]});
  }
  std::sort(out.begin(), out.end(),
            [](const LayerChange& a, const LayerChange& b) { return a.vertex < b.vertex; });
  return out;
}

// Pieces cut off a component, found by one breadth-first search per source
// run in lockstep. Searches that meet are merged; a search that runs dry has
// found a whole piece. The last search still running is never finished, so
// the cost follows the smaller pieces.
struct Split {
  std::vector<std::vector<Vertex>> pieces;  // each sorted
  bool remainder = false;                   // one more piece, not enumerated
};

template <typename Inside>
Split split_pieces(const Graph& g, std::span<const Vertex> sources, Inside inside) {
  struct Search {
    std::vector<Vertex> seen;
    std::vector<Vertex> queue;
    std::size_t head = 0;
    bool done = false;
  };
  std::vector<Search> searches;
  std::vector<std::uint32_t> parent;
  std::unordered_map<Vertex, std::uint32_t> label;
  auto root = [&](std::uint32_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Vertex s : sources) {
    if (label.contains(s)) continue;
    auto i = static_cast<std::uint32_t>(searches.size());
    label.emplace(s, i);
    parent.push_back(i);
    searches.push_back({{s}, {s}, 0, false});
  }
  std::size_t running = searches.size();
  while (running > 1) {
    for (std::uint32_t i = 0; i < searches.size() && running > 1; ++i) {
      if (parent[i] != i || searches[i].done) continue;
      Search& s = searches[i];
      if (s.head == s.queue.size()) {
        s.done = true;
        --running;
        continue;
      }
      Vertex w = s.queue[s.head++];
      std::uint32_t me = i;
      for (Vertex z : g.neighbors(w)) {
        if (!inside(z)) continue;
        auto [it, fresh] = label.emplace(z, me);
        if (fresh) {
          searches[me].seen.push_back(z);
          searches[me].queue.push_back(z);
          continue;
        }
        std::uint32_t other = root(it->second);
        if (other == me) continue;
        // Fold the smaller search into the larger.
        std::uint32_t big = me, small = other;
        if (searches[big].seen.size() < searches[small].seen.size()) std::swap(big, small);
        Search& b = searches[big];
        Search& t = searches[small];
        b.seen.insert(b.seen.end(), t.seen.begin(), t.seen.end());
        b.queue.insert(b.queue.end(), t.queue.begin() + t.head, t.queue.end());
        t = Search{};
        t.done = true;
        parent[small] = big;
        --running;
        me = big;
      }
    }
  }
  Split out;
  for (std::uint32_t i = 0; i < searches.size(); ++i) {
    if (parent[i] != i) continue;
    if (!searches[i].done) {
      out.remainder = true;
      continue;
    }
    std::sort(searches[i].seen.begin(), searches[i].seen.end());
    out.pieces.push_back(std::move(searches[i].seen));
  }
  if (!out.remainder && !out.pieces.empty()) {
    auto largest = std::max_element(
        out.pieces.begin(), out.pieces.end(),
        [](const auto& a, const auto& b) { return a.size() < b.size(); });
    out.pieces.erase(largest);
    out.remainder = true;
  }
  return out;
}

class UnionFind {
 public:
  std::size_t add() {
    parent_.push_back(parent_.size());
    return parent_.size() - 1;
  }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) i = parent_[i] = parent_[parent_[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

// A component whose member set changed. It inherits the follower entries of
// one old component and must re-derive the candidates in `recheck`; the rest
// of `candidates` carries over.
struct Rebuilt {
  ComponentId id = kNoComponent;
  ComponentId heir_of = kNoComponent;
  Candidates inherited;
  std::vector<Vertex> recheck;  // sorted
  std::vector<ComponentId> donors;
  std::vector<std::vector<Vertex>> donor_members;
};

}  // namespace

UpdateReport maintain_followers(const Graph& g, CorenessState& state,
                                ShellIndex& index, FollowerStore& store,
                                Vertex u, Vertex v, EdgeOp op,
                                std::span<const CorenessChange> changes,
                                std::span<const Vertex> support_changed,
                                const ParallelOptions& parallel) {
  UpdateReport report;
  report.u = u;
  report.v = v;
  report.op = op;
  report.applied = true;
  report.coreness_changed.assign(changes.begin(), changes.end());

  std::unordered_map<Vertex, const CorenessChange*> moved_core;
  for (const auto& c : changes) moved_core.emplace(c.vertex, &c);
  auto coreness_before = [&](Vertex w) {
    auto it = moved_core.find(w);
    return it == moved_core.end() ? state.coreness[w] : it->second->before;
  };
  std::vector<Vertex> near_changes;  // changed vertices and their neighbours
  for (const auto& c : changes) {
    near_changes.push_back(c.vertex);
    for (Vertex z : g.neighbors(c.vertex)) near_changes.push_back(z);
  }
  sort_unique(near_changes);

  std::map<ComponentId, Candidates> retired;
  std::vector<Rebuilt> rebuilt;
  std::vector<ComponentId> fresh;  // rebuilt from scratch, no inherited entries
  std::vector<char> visited(g.vertex_count(), 0);
  std::vector<char> mark(g.vertex_count(), 0);

  // 1. Components that lose members or an internal edge, and may split.
  std::map<ComponentId, std::vector<Vertex>> leaving;
  for (const auto& c : changes) leaving[index.owner(c.vertex)].push_back(c.vertex);
  const bool internal_edge = coreness_before(u) == coreness_before(v) &&
                             index.owner(u) == index.owner(v) && u != v;
  const ComponentId edge_owner = internal_edge ? index.owner(u) : kNoComponent;
  if (op == EdgeOp::kRemove && internal_edge) leaving[edge_owner];

  for (auto& [id, gone] : leaving) {
    const ShellComponent& old = *index.find(id);
    const bool cut_edge = op == EdgeOp::kRemove && id == edge_owner;
    auto inside = [&](Vertex z) {
      return index.owner(z) == id && !moved_core.contains(z);
    };
    std::vector<Vertex> sources;
    for (Vertex c : gone) {
      for (Vertex z : g.neighbors(c)) {
        if (inside(z)) sources.push_back(z);
      }
    }
    if (cut_edge) {
      for (Vertex w : {u, v}) {
        if (inside(w)) sources.push_back(w);
      }
    }
    sort_unique(sources);

    Split split;
    if (gone.size() < old.members.size()) {
      if (sources.size() > 1) {
        split = split_pieces(g, sources, inside);
      } else {
        split.remainder = true;
      }
    }
    if (gone.empty() && split.pieces.empty()) {
      index.remove_internal_edge(id, u, v);
      continue;
    }

    ShellComponent taken = index.take(id);
    retired.emplace(id, candidates_of(taken));
    report.retired_components.push_back(id);

    std::vector<Vertex> removed = gone;
    for (const auto& piece : split.pieces) {
      removed.insert(removed.end(), piece.begin(), piece.end());
      ShellComponent pc = flood_shell_component(g, state, piece.front(), visited);
      fresh.push_back(index.insert(std::move(pc)));
    }
    if (!split.remainder) continue;

    sort_unique(removed);
    ShellComponent rest;
    rest.shell_coreness = taken.shell_coreness;
    std::set_difference(taken.members.begin(), taken.members.end(), removed.begin(),
                        removed.end(), std::back_inserter(rest.members));
    for (Vertex w : removed) mark[w] = 1;
    const std::pair cut{std::min(u, v), std::max(u, v)};
    for (const auto& e : taken.internal_edges) {
      if (mark[e.first] || mark[e.second] || (cut_edge && e == cut)) continue;
      rest.internal_edges.push_back(e);
    }
    for (Vertex w : removed) mark[w] = 0;
    rest.collapser_candidates = taken.collapser_candidates;
    rest.anchor_candidates = taken.anchor_candidates;

    Rebuilt r;
    r.heir_of = id;
    r.inherited = candidates_of(taken);
    r.recheck = removed;
    for (Vertex w : removed) {
      for (Vertex z : g.neighbors(w)) r.recheck.push_back(z);
    }
    r.recheck.push_back(u);
    r.recheck.push_back(v);
    sort_unique(r.recheck);
    r.id = index.insert(std::move(rest));
    rebuilt.push_back(std::move(r));
  }

  // 2. Merges: changed vertices join the components of their new shell, and
  // an inserted edge can join two components of one shell.
  {
    UnionFind uf;
    std::unordered_map<Vertex, std::size_t> vertex_node;
    std::unordered_map<ComponentId, std::size_t> component_node;
    std::vector<ComponentId> node_component;  // kNoComponent for vertices
    std::vector<Vertex> node_vertex;
    auto node_of_vertex = [&](Vertex w) {
      auto [it, fresh_node] = vertex_node.try_emplace(w, 0);
      if (fresh_node) {
        it->second = uf.add();
        node_component.push_back(kNoComponent);
        node_vertex.push_back(w);
      }
      return it->second;
    };
    auto node_of_component = [&](ComponentId id) {
      auto [it, fresh_node] = component_node.try_emplace(id, 0);
      if (fresh_node) {
        it->second = uf.add();
        node_component.push_back(id);
        node_vertex.push_back(0);
      }
      return it->second;
    };
    for (const auto& c : changes) {
      std::size_t a = node_of_vertex(c.vertex);
      for (Vertex z : g.neighbors(c.vertex)) {
        if (state.coreness[z] != c.after) continue;
        uf.unite(a, moved_core.contains(z) ? node_of_vertex(z)
                                           : node_of_component(index.owner(z)));
      }
    }
    const bool joining_edge = op == EdgeOp::kInsert && !moved_core.contains(u) &&
                              !moved_core.contains(v) &&
                              state.coreness[u] == state.coreness[v] &&
                              index.owner(u) != index.owner(v);
    if (joining_edge) {
      uf.unite(node_of_component(index.owner(u)), node_of_component(index.owner(v)));
    }

    std::map<std::size_t, std::pair<std::vector<Vertex>, std::vector<ComponentId>>> groups;
    for (std::size_t i = 0; i < node_component.size(); ++i) {
      auto& [vs, cs] = groups[uf.find(i)];
      if (node_component[i] == kNoComponent) {
        vs.push_back(node_vertex[i]);
      } else {
        cs.push_back(node_component[i]);
      }
    }
    for (auto& [root, group] : groups) {
      auto& [arrivals, parts] = group;
      if (arrivals.empty() && parts.size() < 2) continue;
      sort_unique(arrivals);
      if (parts.empty()) {
        fresh.push_back(index.insert(
            flood_shell_component(g, state, arrivals.front(), visited)));
        continue;
      }
      std::sort(parts.begin(), parts.end(), [&](ComponentId a, ComponentId b) {
        auto sa = index.find(a)->members.size(), sb = index.find(b)->members.size();
        return sa != sb ? sa > sb : a < b;
      });

      Rebuilt r;
      r.heir_of = parts.front();
      ShellComponent merged = index.take(parts.front());
      retired.emplace(parts.front(), candidates_of(merged));
      report.retired_components.push_back(parts.front());
      r.inherited = candidates_of(merged);
      r.recheck = arrivals;
      for (Vertex c : arrivals) {
        for (Vertex z : g.neighbors(c)) r.recheck.push_back(z);
      }
      r.recheck.push_back(u);
      r.recheck.push_back(v);

      std::vector<Vertex> members = arrivals;
      std::vector<std::pair<Vertex, Vertex>> edges;
      std::vector<Vertex> up = arrivals, down = arrivals;
      for (std::size_t i = 1; i < parts.size(); ++i) {
        ShellComponent part = index.take(parts[i]);
        retired.emplace(parts[i], candidates_of(part));
        report.retired_components.push_back(parts[i]);
        members.insert(members.end(), part.members.begin(), part.members.end());
        edges.insert(edges.end(), part.internal_edges.begin(), part.internal_edges.end());
        up.insert(up.end(), part.collapser_candidates.begin(), part.collapser_candidates.end());
        down.insert(down.end(), part.anchor_candidates.begin(), part.anchor_candidates.end());
        // Outside candidates of a donor may see seeds on both sides.
        for (Vertex x : part.collapser_candidates) r.recheck.push_back(x);
        for (Vertex x : part.anchor_candidates) r.recheck.push_back(x);
        r.donors.push_back(parts[i]);
        r.donor_members.push_back(std::move(part.members));
      }
      for (Vertex c : arrivals) {
        for (Vertex z : g.neighbors(c)) {
          if (state.coreness[z] == state.coreness[c]) {
            edges.emplace_back(std::min(c, z), std::max(c, z));
          }
        }
      }
      if (joining_edge) edges.emplace_back(std::min(u, v), std::max(u, v));

      auto absorb = [](auto& base, auto& extra) {
        std::sort(extra.begin(), extra.end());
        extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
        const auto mid = static_cast<std::ptrdiff_t>(base.size());
        base.insert(base.end(), extra.begin(), extra.end());
        std::inplace_merge(base.begin(), base.begin() + mid, base.end());
        base.erase(std::unique(base.begin(), base.end()), base.end());
      };
      absorb(merged.members, members);
      absorb(merged.internal_edges, edges);
      absorb(merged.collapser_candidates, up);
      absorb(merged.anchor_candidates, down);
      sort_unique(r.recheck);
      r.id = index.insert(std::move(merged));
      rebuilt.push_back(std::move(r));
    }
    if (op == EdgeOp::kInsert && internal_edge && !moved_core.contains(u) &&
        !moved_core.contains(v)) {
      index.add_internal_edge(index.owner(u), u, v);
    }
  }
  for (const auto& r : rebuilt) report.new_components.push_back(r.id);
  report.new_components.insert(report.new_components.end(), fresh.begin(), fresh.end());
  std::sort(report.new_components.begin(), report.new_components.end());
  std::sort(report.retired_components.begin(), report.retired_components.end());
  auto is_new = [&](ComponentId id) {
    return std::binary_search(report.new_components.begin(),
                              report.new_components.end(), id);
  };

  // 3. Candidate sets. Only the rechecked vertices can have changed status.
  auto classify = [&](Vertex x, ComponentId id, Coreness shell) {
    if (index.owner(x) == id) return std::pair{true, true};
    const Coreness cx = state.coreness[x];
    if (cx == shell) return std::pair{false, false};
    bool adjacent = false;
    for (Vertex z : g.neighbors(x)) {
      if (index.owner(z) == id) {
        adjacent = true;
        break;
      }
    }
    return std::pair{adjacent && cx > shell, adjacent && cx < shell};
  };
  for (const auto& r : rebuilt) {
    const ShellComponent& c = *index.find(r.id);
    std::vector<Vertex> up, down;
    auto carry = [&](const std::vector<Vertex>& base, std::vector<Vertex>& out) {
      for (Vertex x : base) {
        if (!contains(r.recheck, x)) out.push_back(x);
      }
    };
    carry(c.collapser_candidates, up);
    carry(c.anchor_candidates, down);
    for (Vertex x : r.recheck) {
      auto [in_up, in_down] = classify(x, r.id, c.shell_coreness);
      if (in_up) up.push_back(x);
      if (in_down) down.push_back(x);
    }
    std::sort(up.begin(), up.end());
    std::sort(down.begin(), down.end());
    index.set_candidates(r.id, std::move(up), std::move(down));
  }

  // Components that kept their members can only gain or lose a changed
  // vertex or an edge endpoint as an outside candidate.
  std::map<ComponentId, Candidates> refreshed;  // same id, old candidates
  {
    std::vector<Vertex> movers{u, v};
    for (const auto& c : changes) movers.push_back(c.vertex);
    sort_unique(movers);
    std::vector<ComponentId> touched;
    for (Vertex z : near_changes) touched.push_back(index.owner(z));
    touched.push_back(index.owner(u));
    touched.push_back(index.owner(v));
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (ComponentId id : touched) {
      if (is_new(id)) continue;
      const ShellComponent& c = *index.find(id);
      std::vector<Vertex> up = c.collapser_candidates, down = c.anchor_candidates;
      auto toggle = [](std::vector<Vertex>& list, Vertex x, bool want) {
        auto it = std::lower_bound(list.begin(), list.end(), x);
        bool has = it != list.end() && *it == x;
        if (want && !has) list.insert(it, x);
        if (!want && has) list.erase(it);
      };
      for (Vertex x : movers) {
        auto [in_up, in_down] = classify(x, id, c.shell_coreness);
        toggle(up, x, in_up);
        toggle(down, x, in_down);
      }
      if (up == c.collapser_candidates && down == c.anchor_candidates) continue;
      refreshed.emplace(id, candidates_of(c));
      index.set_candidates(id, std::move(up), std::move(down));
    }
  }

  // 4. Layers.
  const std::vector<LayerChange> relayered = settle_layers(g, state, u, v, op, changes);

  // 5. Searches that read anything that moved. An expanded vertex reads its
  // own adjacency, support and layer, and for each neighbour only whether it
  // sits at the search's coreness and, in an anchor search, how its layer
  // compares to the vertex's own. Keys carry the ids from before the event.
  auto shell_of = [&](ComponentId id) {
    if (const ShellComponent* c = index.find(id)) return c->shell_coreness;
    return retired.at(id).shell;
  };
  std::vector<SearchKey> invalid;
  auto collect = [&](Vertex w, auto&& keep) {
    for (const SearchKey& key : store.readers(std::span<const Vertex>(&w, 1))) {
      if (keep(key)) invalid.push_back(key);
    }
  };
  for (auto [self, other] : {std::pair{u, v}, std::pair{v, u}}) {
    const Coreness c0 = coreness_before(other);
    const Coreness c1 = state.coreness[other];
    collect(self, [&](const SearchKey& key) {
      Coreness k = shell_of(key.component);
      return key.candidate == self || k == c0 || k == c1;
    });
  }
  for (Vertex w : support_changed) collect(w, [](const SearchKey&) { return true; });
  for (const auto& c : changes) {
    collect(c.vertex, [](const SearchKey&) { return true; });
    for (Vertex z : g.neighbors(c.vertex)) {
      collect(z, [&](const SearchKey& key) {
        Coreness k = shell_of(key.component);
        return key.candidate == z || k == c.before || k == c.after;
      });
    }
  }
  for (const auto& l : relayered) {
    collect(l.vertex, [](const SearchKey& key) { return key.kind == SearchKind::kAnchor; });
    const auto lo = std::min(l.before, l.after);
    const auto hi = std::max(l.before, l.after);
    const Coreness k = state.coreness[l.vertex];
    for (Vertex z : g.neighbors(l.vertex)) {
      if (state.layer[z] < lo || state.layer[z] >= hi) continue;
      collect(z, [&](const SearchKey& key) {
        return key.kind == SearchKind::kAnchor && shell_of(key.component) == k;
      });
    }
  }
  std::sort(invalid.begin(), invalid.end());
  invalid.erase(std::unique(invalid.begin(), invalid.end()), invalid.end());
  auto is_invalid = [&](const SearchKey& k) {
    return std::binary_search(invalid.begin(), invalid.end(), k);
  };

  // 6. Decide, per candidate, between keeping, moving and rerunning.
  std::vector<SearchKey> tasks;
  std::vector<Vertex> affected;
  std::set<ComponentId> recomputed(report.new_components.begin(),
                                   report.new_components.end());

  for (const auto& [id, old] : refreshed) {
    recomputed.insert(id);
    const ShellComponent& c = *index.find(id);
    for (SearchKind kind : kKinds) {
      const auto& before = old.of(kind);
      const auto& after = candidates_of(c, kind);
      for (Vertex x : before) {
        if (!contains(after, x) && store.remove({id, x, kind})) affected.push_back(x);
      }
      for (Vertex x : after) {
        SearchKey key{id, x, kind};
        if (!contains(before, x) || is_invalid(key)) tasks.push_back(key);
      }
    }
  }

  for (const SearchKey& key : invalid) {
    if (refreshed.contains(key.component) || retired.contains(key.component)) continue;
    tasks.push_back(key);
  }

  for (const auto& r : rebuilt) {
    store.rename(r.heir_of, r.id);
    const ShellComponent& c = *index.find(r.id);
    for (SearchKind kind : kKinds) {
      const auto& before = r.inherited.of(kind);
      const auto& after = candidates_of(c, kind);
      for (Vertex x : before) {
        if (!contains(after, x) && store.remove({r.id, x, kind})) affected.push_back(x);
      }
      for (Vertex x : after) {
        const bool rerun = contains(r.recheck, x);
        if (contains(before, x)) {
          if (rerun || is_invalid({r.heir_of, x, kind})) tasks.push_back({r.id, x, kind});
          continue;
        }
        // A member of a merged-in component keeps its own entry.
        bool adopted = false;
        for (std::size_t d = 0; d < r.donors.size() && !rerun; ++d) {
          if (!contains(r.donor_members[d], x)) continue;
          SearchKey from{r.donors[d], x, kind};
          if (!is_invalid(from) && store.find(from)) {
            store.move(from, r.id);
            adopted = true;
          }
          break;
        }
        if (!adopted) tasks.push_back({r.id, x, kind});
      }
    }
  }

  for (ComponentId id : fresh) {
    const ShellComponent& c = *index.find(id);
    for (SearchKind kind : kKinds) {
      for (Vertex x : candidates_of(c, kind)) tasks.push_back({id, x, kind});
    }
  }

  // Entries left under retired ids are expired.
  std::set<ComponentId> inherited_ids;
  for (const auto& r : rebuilt) inherited_ids.insert(r.heir_of);
  for (const auto& [id, old] : retired) {
    if (inherited_ids.contains(id)) continue;
    for (SearchKind kind : kKinds) {
      for (Vertex x : old.of(kind)) {
        const auto* f = store.find({id, x, kind});
        if (f && !f->empty()) affected.push_back(x);
      }
    }
    store.erase(id);
  }

  auto results = run_searches(g, state, index, tasks, parallel);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    recomputed.insert(tasks[i].component);
    if (store.set(tasks[i], std::move(results[i].followers), results[i].footprint)) {
      affected.push_back(tasks[i].candidate);
    }
  }
  report.recomputed_components.assign(recomputed.begin(), recomputed.end());

  sort_unique(affected);
  for (Vertex x : affected) {
    if (store.refresh_aggregate(g, state, index, x)) {
      ++report.updated_follower_vertices;
    }
  }
  return report;
}

Engine::Engine(Graph g, EngineOptions options)
    : graph_(std::move(g)), options_(options) {
  state_ = core_decompose(graph_);
  index_ = shell_decompose(graph_, state_);
  store_ = compute_offline_followers(graph_, state_, index_, options_.parallel);
}

UpdateReport Engine::apply(EdgeOp op, Vertex u, Vertex v) {
  bool changed = op == EdgeOp::kInsert ? graph_.insert_edge(u, v)
                                       : graph_.remove_edge(u, v);
  if (!changed) {
    UpdateReport noop;
    noop.u = u;
    noop.v = v;
    noop.op = op;
    return noop;
  }
  std::vector<Vertex> support_changed;
  auto changes = maintain_coreness(graph_, state_, u, v, op,
                                   options_.core_maintenance, &support_changed);
  return maintain_followers(graph_, state_, index_, store_, u, v, op, changes,
                            support_changed, options_.parallel);
}

Vertex Engine::add_vertex(std::string label) {
  Vertex id = graph_.add_vertex(std::move(label));
  state_.coreness.push_back(0);
  state_.layer.push_back(1);
  state_.higher_support.push_back(0);
  index_.add_vertex();
  store_.add_vertex();
  std::vector<char> visited(graph_.vertex_count(), 0);
  ComponentId cid =
      index_.insert(flood_shell_component(graph_, state_, id, visited));
  std::vector<ComponentId> dirty{cid};
  compute_all_followers(graph_, state_, index_, dirty, store_,
                        options_.parallel);
  return id;
}

}  // namespace kfollow
