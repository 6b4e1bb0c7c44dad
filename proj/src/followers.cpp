#include "kfollow/followers.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <deque>
#include <optional>
#include <queue>
#include <string>
#include <thread>

namespace kfollow {

namespace {

const std::vector<Vertex>* lookup(const std::vector<FollowerEntry>& entries,
                                  Vertex x) {
  auto it = std::lower_bound(
      entries.begin(), entries.end(), x,
      [](const FollowerEntry& e, Vertex v) { return e.candidate < v; });
  if (it == entries.end() || it->candidate != x) return nullptr;
  return &it->followers;
}

void require_candidate(const std::vector<Vertex>& candidates, Vertex x,
                       const ShellComponent& component, const char* kind) {
  if (!std::binary_search(candidates.begin(), candidates.end(), x)) {
    throw PreconditionError("vertex " + std::to_string(x) + " is not " + kind +
                            " candidate of component " +
                            std::to_string(component.id));
  }
}

// Every vertex whose adjacency a search scanned was touched in the overlay,
// except x itself when it lies outside the component.
void record_footprint(const SupportOverlay& overlay, Vertex x,
                      std::vector<Vertex>& out) {
  auto touched = overlay.touched();
  out.assign(touched.begin(), touched.end());
  if (!overlay.was_touched(x)) out.push_back(x);
}

}  // namespace

// ---------------------------------------------------------------------------
// FollowerStore

const std::vector<Vertex>* FollowerStore::collapsed(Vertex x,
                                                    ComponentId id) const {
  const ComponentFollowers* e = entries(id);
  return e ? lookup(e->collapsed, x) : nullptr;
}

const std::vector<Vertex>* FollowerStore::anchored(Vertex x,
                                                   ComponentId id) const {
  const ComponentFollowers* e = entries(id);
  return e ? lookup(e->anchored, x) : nullptr;
}

const ComponentFollowers* FollowerStore::entries(ComponentId id) const {
  auto it = per_component_.find(id);
  return it == per_component_.end() ? nullptr : &it->second;
}

const std::vector<Vertex>* FollowerStore::find(const SearchKey& key) const {
  return key.kind == SearchKind::kCollapse ? collapsed(key.candidate, key.component)
                                           : anchored(key.candidate, key.component);
}

FollowerStore::Slot FollowerStore::locate(const SearchKey& key) {
  auto& c = per_component_[key.component];
  auto& sc = serials_[key.component];
  auto& entries = key.kind == SearchKind::kCollapse ? c.collapsed : c.anchored;
  auto& serials = key.kind == SearchKind::kCollapse ? sc.collapsed : sc.anchored;
  std::size_t pos = entries.size();
  if (!entries.empty() && entries.back().candidate >= key.candidate) {
    pos = std::lower_bound(entries.begin(), entries.end(), key.candidate,
                           [](const FollowerEntry& e, Vertex v) { return e.candidate < v; }) -
          entries.begin();
  }
  bool found = pos < entries.size() && entries[pos].candidate == key.candidate;
  return {&entries, &serials, pos, found};
}

void FollowerStore::retire_serial(std::uint32_t serial) {
  if (live_[serial]) {
    live_[serial] = 0;
    --live_count_;
  }
}

std::uint32_t FollowerStore::new_serial(const SearchKey& key,
                                        std::span<const Vertex> footprint) {
  auto serial = static_cast<std::uint32_t>(key_of_.size());
  key_of_.push_back(key);
  live_.push_back(1);
  ++live_count_;
  for (Vertex v : footprint) readers_[v].push_back(serial);
  return serial;
}

void FollowerStore::compact() {
  std::vector<std::uint32_t> renumber(key_of_.size(), 0);
  std::vector<SearchKey> keys;
  keys.reserve(live_count_);
  for (std::uint32_t s = 0; s < key_of_.size(); ++s) {
    if (!live_[s]) continue;
    renumber[s] = static_cast<std::uint32_t>(keys.size());
    keys.push_back(key_of_[s]);
  }
  for (auto& [id, sc] : serials_) {
    for (auto& s : sc.collapsed) s = renumber[s];
    for (auto& s : sc.anchored) s = renumber[s];
  }
  for (auto& list : readers_) {
    std::size_t kept = 0;
    for (std::uint32_t s : list) {
      if (live_[s]) list[kept++] = renumber[s];
    }
    list.resize(kept);
  }
  key_of_ = std::move(keys);
  live_.assign(key_of_.size(), 1);
}

bool FollowerStore::set(const SearchKey& key, std::vector<Vertex> followers,
                        std::span<const Vertex> footprint) {
  if (key_of_.size() > 4 * live_count_ + 4096) compact();
  Slot slot = locate(key);
  std::uint32_t serial = new_serial(key, footprint);
  if (slot.found) {
    retire_serial((*slot.serials)[slot.pos]);
    (*slot.serials)[slot.pos] = serial;
    auto& current = (*slot.entries)[slot.pos].followers;
    bool changed = current != followers;
    current = std::move(followers);
    return changed;
  }
  bool changed = !followers.empty();
  slot.entries->insert(slot.entries->begin() + slot.pos,
                       FollowerEntry{key.candidate, std::move(followers)});
  slot.serials->insert(slot.serials->begin() + slot.pos, serial);
  return changed;
}

std::optional<std::vector<Vertex>> FollowerStore::take(const SearchKey& key) {
  if (!per_component_.contains(key.component)) return std::nullopt;
  Slot slot = locate(key);
  if (!slot.found) return std::nullopt;
  std::vector<Vertex> followers = std::move((*slot.entries)[slot.pos].followers);
  slot.entries->erase(slot.entries->begin() + slot.pos);
  retire_serial((*slot.serials)[slot.pos]);
  slot.serials->erase(slot.serials->begin() + slot.pos);
  return followers;
}

bool FollowerStore::remove(const SearchKey& key) {
  auto followers = take(key);
  return followers && !followers->empty();
}

void FollowerStore::move(const SearchKey& from, ComponentId to) {
  if (!per_component_.contains(from.component)) {
    throw std::out_of_range("no follower entry to move");
  }
  Slot src = locate(from);
  if (!src.found) throw std::out_of_range("no follower entry to move");
  std::vector<Vertex> followers = std::move((*src.entries)[src.pos].followers);
  std::uint32_t serial = (*src.serials)[src.pos];
  src.entries->erase(src.entries->begin() + src.pos);
  src.serials->erase(src.serials->begin() + src.pos);

  const SearchKey target{to, from.candidate, from.kind};
  key_of_[serial] = target;
  Slot dst = locate(target);
  if (dst.found) {
    retire_serial((*dst.serials)[dst.pos]);
    (*dst.entries)[dst.pos].followers = std::move(followers);
    (*dst.serials)[dst.pos] = serial;
    return;
  }
  dst.entries->insert(dst.entries->begin() + dst.pos,
                      FollowerEntry{target.candidate, std::move(followers)});
  dst.serials->insert(dst.serials->begin() + dst.pos, serial);
}

void FollowerStore::rename(ComponentId from, ComponentId to) {
  if (from == to) return;
  erase(to);
  auto entries = per_component_.extract(from);
  auto serials = serials_.extract(from);
  if (entries.empty()) return;
  for (std::uint32_t s : serials.mapped().collapsed) key_of_[s].component = to;
  for (std::uint32_t s : serials.mapped().anchored) key_of_[s].component = to;
  entries.key() = to;
  serials.key() = to;
  per_component_.insert(std::move(entries));
  serials_.insert(std::move(serials));
}

bool FollowerStore::erase(ComponentId id) {
  auto it = per_component_.find(id);
  if (it == per_component_.end()) return false;
  if (auto sc = serials_.find(id); sc != serials_.end()) {
    for (std::uint32_t s : sc->second.collapsed) retire_serial(s);
    for (std::uint32_t s : sc->second.anchored) retire_serial(s);
    serials_.erase(sc);
  }
  per_component_.erase(it);
  return true;
}

std::vector<SearchKey> FollowerStore::readers(std::span<const Vertex> vertices) {
  std::vector<SearchKey> out;
  for (Vertex v : vertices) {
    auto& serials = readers_[v];
    std::size_t kept = 0;
    for (std::uint32_t s : serials) {
      if (!live_[s]) continue;
      serials[kept++] = s;
      out.push_back(key_of_[s]);
    }
    serials.resize(kept);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::pair<const std::vector<Vertex>&, const std::vector<Vertex>&>
FollowerStore::followers_of(Vertex x) const {
  return {collapsed_of(x), anchored_of(x)};
}

const std::vector<Vertex>& FollowerStore::collapsed_of(Vertex x) const {
  if (x >= collapsed_.size()) {
    throw std::out_of_range("vertex id " + std::to_string(x) + " out of range");
  }
  return collapsed_[x];
}

const std::vector<Vertex>& FollowerStore::anchored_of(Vertex x) const {
  if (x >= anchored_.size()) {
    throw std::out_of_range("vertex id " + std::to_string(x) + " out of range");
  }
  return anchored_[x];
}

bool FollowerStore::refresh_aggregate(const Graph& g,
                                      const CorenessState& state,
                                      const ShellIndex& index, Vertex x) {
  // x is a collapser candidate of its own component and of every adjacent
  // lower-coreness component; an anchor candidate of its own and of every
  // adjacent higher-coreness one.
  std::vector<ComponentId> down{index.owner(x)};
  std::vector<ComponentId> up{index.owner(x)};
  const Coreness cx = state.coreness[x];
  for (Vertex v : g.neighbors(x)) {
    if (state.coreness[v] < cx) {
      down.push_back(index.owner(v));
    } else if (state.coreness[v] > cx) {
      up.push_back(index.owner(v));
    }
  }
  std::sort(down.begin(), down.end());
  down.erase(std::unique(down.begin(), down.end()), down.end());
  std::sort(up.begin(), up.end());
  up.erase(std::unique(up.begin(), up.end()), up.end());

  // Components partition V, so the per-component sets are disjoint.
  std::vector<Vertex> collapsed_union;
  for (ComponentId id : down) {
    if (const auto* f = collapsed(x, id)) {
      collapsed_union.insert(collapsed_union.end(), f->begin(), f->end());
    }
  }
  std::vector<Vertex> anchored_union;
  for (ComponentId id : up) {
    if (const auto* f = anchored(x, id)) {
      anchored_union.insert(anchored_union.end(), f->begin(), f->end());
    }
  }
  std::sort(collapsed_union.begin(), collapsed_union.end());
  std::sort(anchored_union.begin(), anchored_union.end());

  bool changed = collapsed_union != collapsed_[x] || anchored_union != anchored_[x];
  collapsed_[x] = std::move(collapsed_union);
  anchored_[x] = std::move(anchored_union);
  return changed;
}

void FollowerStore::rebuild_aggregates(std::size_t vertex_count) {
  collapsed_.assign(vertex_count, {});
  anchored_.assign(vertex_count, {});
  for (const auto& [id, entries] : per_component_) {
    for (const auto& e : entries.collapsed) {
      auto& dst = collapsed_[e.candidate];
      dst.insert(dst.end(), e.followers.begin(), e.followers.end());
    }
    for (const auto& e : entries.anchored) {
      auto& dst = anchored_[e.candidate];
      dst.insert(dst.end(), e.followers.begin(), e.followers.end());
    }
  }
  for (auto& v : collapsed_) std::sort(v.begin(), v.end());
  for (auto& v : anchored_) std::sort(v.begin(), v.end());
}

void FollowerStore::add_vertex() {
  collapsed_.emplace_back();
  anchored_.emplace_back();
  readers_.emplace_back();
}

// ---------------------------------------------------------------------------
// SupportOverlay

SupportOverlay::SupportOverlay(const CorenessState& base)
    : base_(&base),
      delta_(base.size(), 0),
      mark_(base.size(), SearchMark::kUnexplored),
      queued_(base.size(), 0),
      bound_(base.size(), 0),
      touched_flag_(base.size(), 0) {}

void SupportOverlay::reset() {
  for (Vertex v : touched_) {
    delta_[v] = 0;
    mark_[v] = SearchMark::kUnexplored;
    queued_[v] = 0;
    bound_[v] = 0;
    touched_flag_[v] = 0;
  }
  touched_.clear();
}

// ---------------------------------------------------------------------------
// Searches

std::vector<Vertex> find_collapsed_followers(
    const Graph& g, const ShellIndex& index, const ShellComponent& component,
    Vertex x, SupportOverlay& overlay, std::vector<Vertex>* footprint) {
  require_candidate(component.collapser_candidates, x, component, "a collapser");
  const CorenessState& state = overlay.base();
  const Coreness k = component.shell_coreness;
  std::deque<Vertex> queue;
  std::vector<Vertex> discarded;

  auto push = [&](Vertex v) {
    overlay.set_queued(v, true);
    queue.push_back(v);
  };

  if (component.contains(x)) {
    overlay.set_mark(x, SearchMark::kDiscarded);
    push(x);
  } else {
    for (Vertex u : g.neighbors(x)) {
      if (index.owner(u) != component.id) continue;
      overlay.adjust_support(u, -1);
      push(u);
    }
  }

  while (!queue.empty()) {
    Vertex u = queue.front();
    queue.pop_front();
    overlay.set_queued(u, false);
    if (u != x && overlay.mark(u) != SearchMark::kDiscarded) {
      std::int64_t bound = overlay.higher_support(u);
      for (Vertex v : g.neighbors(u)) {
        if (state.coreness[v] == k && overlay.mark(v) != SearchMark::kDiscarded) {
          ++bound;
        }
      }
      if (bound < static_cast<std::int64_t>(k)) {
        overlay.set_mark(u, SearchMark::kDiscarded);
        discarded.push_back(u);
      } else {
        continue;
      }
    }
    for (Vertex v : g.neighbors(u)) {
      if (state.coreness[v] != k) continue;
      if (overlay.mark(v) == SearchMark::kDiscarded || overlay.queued(v)) continue;
      push(v);
    }
  }

  if (footprint) record_footprint(overlay, x, *footprint);
  overlay.reset();
  std::sort(discarded.begin(), discarded.end());
  return discarded;
}

std::vector<Vertex> find_anchored_followers(
    const Graph& g, const ShellIndex& index, const ShellComponent& component,
    Vertex x, SupportOverlay& overlay, AnchoredSearchCounters* counters,
    std::vector<Vertex>* footprint) {
  require_candidate(component.anchor_candidates, x, component, "an anchor");
  const CorenessState& state = overlay.base();
  const Coreness k = component.shell_coreness;
  const std::int64_t need = static_cast<std::int64_t>(k) + 1;

  using Item = std::pair<std::uint32_t, Vertex>;  // (layer, vertex)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  auto push = [&](Vertex v) {
    overlay.set_queued(v, true);
    heap.emplace(state.layer[v], v);
  };
  auto in_component = [&](Vertex v) { return state.coreness[v] == k; };

  // Cascading discard: every survived neighbor loses the support it counted
  // from v.
  std::vector<Vertex> worklist;
  auto shrink = [&](Vertex start) {
    worklist.assign(1, start);
    while (!worklist.empty()) {
      Vertex w = worklist.back();
      worklist.pop_back();
      for (Vertex v : g.neighbors(w)) {
        if (!in_component(v) || v == x) continue;
        if (overlay.mark(v) != SearchMark::kSurvived) continue;
        std::int64_t& bound = overlay.degree_bound(v);
        if (--bound < need) {
          overlay.set_mark(v, SearchMark::kDiscarded);
          worklist.push_back(v);
          if (counters) ++counters->shrink_discards;
        }
      }
    }
  };

  if (component.contains(x)) {
    overlay.set_mark(x, SearchMark::kSurvived);
    push(x);
  } else {
    for (Vertex u : g.neighbors(x)) {
      if (index.owner(u) != component.id) continue;
      overlay.adjust_support(u, +1);
      push(u);
    }
  }

  std::vector<Vertex> survived;
  while (!heap.empty()) {
    auto [lu, u] = heap.top();
    heap.pop();
    overlay.set_queued(u, false);
    if (counters) ++counters->pops;
    assert(overlay.mark(u) == SearchMark::kUnexplored ||
           (u == x && overlay.mark(u) == SearchMark::kSurvived));
    if (u != x) {
      std::int64_t bound = overlay.higher_support(u);
      for (Vertex v : g.neighbors(u)) {
        if (!in_component(v)) continue;
        const SearchMark mv = overlay.mark(v);
        if (state.layer[v] <= lu) {
          bound += mv == SearchMark::kSurvived || overlay.queued(v);
        } else {
          bound += mv != SearchMark::kDiscarded;
        }
      }
      if (bound >= need) {
        overlay.set_mark(u, SearchMark::kSurvived);
        overlay.degree_bound(u) = bound;
        survived.push_back(u);
      }
    }
    if (overlay.mark(u) == SearchMark::kSurvived) {
      for (Vertex v : g.neighbors(u)) {
        if (!in_component(v) || state.layer[v] <= lu) continue;
        if (overlay.queued(v)) continue;
        push(v);
      }
    } else {
      overlay.set_mark(u, SearchMark::kDiscarded);
      shrink(u);
    }
  }

  std::vector<Vertex> out;
  out.reserve(survived.size());
  for (Vertex v : survived) {
    if (overlay.mark(v) == SearchMark::kSurvived) out.push_back(v);
  }
  if (footprint) record_footprint(overlay, x, *footprint);
  overlay.reset();
  std::sort(out.begin(), out.end());
  return out;
}

ComponentFollowers compute_component_followers(const Graph& g,
                                               const ShellIndex& index,
                                               const ShellComponent& component,
                                               SupportOverlay& overlay) {
  ComponentFollowers out;
  out.collapsed.reserve(component.collapser_candidates.size());
  for (Vertex x : component.collapser_candidates) {
    out.collapsed.push_back(
        {x, find_collapsed_followers(g, index, component, x, overlay)});
  }
  out.anchored.reserve(component.anchor_candidates.size());
  for (Vertex x : component.anchor_candidates) {
    out.anchored.push_back(
        {x, find_anchored_followers(g, index, component, x, overlay)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scheduling

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::vector<SearchResult> run_searches(const Graph& g, const CorenessState& state,
                                       const ShellIndex& index,
                                       std::span<const SearchKey> keys,
                                       const ParallelOptions& options) {
  std::vector<SearchResult> results(keys.size());
  if (keys.empty()) return results;

  // Components are resolved up front so workers only read.
  std::vector<const ShellComponent*> components(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    components[i] = index.find(keys[i].component);
    if (components[i] == nullptr) {
      throw IndexConsistencyError("component " + std::to_string(keys[i].component) +
                                  " is not live");
    }
  }

  constexpr std::size_t kChunk = 64;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    SupportOverlay overlay(state);
    for (std::size_t begin = next.fetch_add(kChunk); begin < keys.size();
         begin = next.fetch_add(kChunk)) {
      std::size_t end = std::min(begin + kChunk, keys.size());
      for (std::size_t i = begin; i < end; ++i) {
        const SearchKey& key = keys[i];
        SearchResult& r = results[i];
        if (key.kind == SearchKind::kCollapse) {
          r.followers = find_collapsed_followers(g, index, *components[i], key.candidate,
                                                 overlay, &r.footprint);
        } else {
          r.followers = find_anchored_followers(g, index, *components[i], key.candidate,
                                                overlay, nullptr, &r.footprint);
        }
      }
    }
  };

  std::size_t chunks = (keys.size() + kChunk - 1) / kChunk;
  unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(resolve_threads(options.threads), chunks));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  return results;
}

void compute_all_followers(const Graph& g, const CorenessState& state,
                           const ShellIndex& index,
                           std::span<const ComponentId> dirty,
                           FollowerStore& store,
                           const ParallelOptions& options) {
  std::vector<SearchKey> keys;
  for (ComponentId id : dirty) {
    const ShellComponent* c = index.find(id);
    if (c == nullptr) {
      throw IndexConsistencyError("dirty component " + std::to_string(id) +
                                  " is not live");
    }
    store.erase(id);
    for (Vertex x : c->collapser_candidates) keys.push_back({id, x, SearchKind::kCollapse});
    for (Vertex x : c->anchor_candidates) keys.push_back({id, x, SearchKind::kAnchor});
  }
  auto results = run_searches(g, state, index, keys, options);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    store.set(keys[i], std::move(results[i].followers), results[i].footprint);
  }
}

FollowerStore compute_offline_followers(const Graph& g,
                                        const CorenessState& state,
                                        const ShellIndex& index,
                                        const ParallelOptions& options) {
  FollowerStore store(g.vertex_count());
  std::vector<ComponentId> all;
  all.reserve(index.components().size());
  for (const auto& [id, component] : index.components()) all.push_back(id);
  compute_all_followers(g, state, index, all, store, options);
  store.rebuild_aggregates(g.vertex_count());
  return store;
}

}  // namespace kfollow
