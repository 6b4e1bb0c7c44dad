#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kfollow/core_decomp.hpp"
#include "kfollow/graph.hpp"
#include "kfollow/shell_index.hpp"

namespace kfollow {

/// Followers of one candidate inside one component.
struct FollowerEntry {
  Vertex candidate;
  std::vector<Vertex> followers;  // sorted

  friend bool operator==(const FollowerEntry&, const FollowerEntry&) = default;
};

/// Per-component follower entries, each list sorted by candidate. Every
/// candidate of the component has an entry, possibly empty.
struct ComponentFollowers {
  std::vector<FollowerEntry> collapsed;
  std::vector<FollowerEntry> anchored;

  friend bool operator==(const ComponentFollowers&,
                         const ComponentFollowers&) = default;
};

enum class SearchKind : std::uint8_t { kCollapse, kAnchor };

/// One follower search: a candidate inside a component.
struct SearchKey {
  ComponentId component = kNoComponent;
  Vertex candidate = 0;
  SearchKind kind = SearchKind::kCollapse;

  friend auto operator<=>(const SearchKey&, const SearchKey&) = default;
};

struct SearchKeyHash {
  std::size_t operator()(const SearchKey& k) const noexcept {
    std::uint64_t h = k.component * 0x9e3779b97f4a7c15ULL;
    h ^= (static_cast<std::uint64_t>(k.candidate) << 1 |
          static_cast<std::uint64_t>(k.kind)) +
         0x7f4a7c159e3779b9ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

/// Collapsed and anchored followers per (candidate, component), keyed by
/// component id, plus the per-vertex unions over live components.
///
/// Each entry also remembers the vertices its search expanded. A search only
/// reads the adjacency, coreness, layer and support of those vertices and the
/// coreness and layer of their neighbours, so readers() finds every entry an
/// edge event can invalidate.
class FollowerStore {
 public:
  FollowerStore() = default;
  explicit FollowerStore(std::size_t vertex_count)
      : collapsed_(vertex_count), anchored_(vertex_count), readers_(vertex_count) {}

  std::size_t vertex_count() const noexcept { return collapsed_.size(); }

  /// nullptr when no entry exists for (x, id).
  const std::vector<Vertex>* collapsed(Vertex x, ComponentId id) const;
  const std::vector<Vertex>* anchored(Vertex x, ComponentId id) const;
  const std::vector<Vertex>* find(const SearchKey& key) const;
  const ComponentFollowers* entries(ComponentId id) const;
  const std::unordered_map<ComponentId, ComponentFollowers>& all_entries()
      const noexcept {
    return per_component_;
  }

  /// Stores one search result and the vertices it expanded. Returns true if
  /// the stored follower set differs from the previous one (a missing entry
  /// counts as empty).
  bool set(const SearchKey& key, std::vector<Vertex> followers,
           std::span<const Vertex> footprint);
  /// Drops one entry. Returns true if it existed with a nonempty set.
  bool remove(const SearchKey& key);
  /// Re-files an entry under another component id, keeping its footprint.
  void move(const SearchKey& from, ComponentId to);
  /// Re-files every entry of a component under a fresh id.
  void rename(ComponentId from, ComponentId to);
  /// Drops every entry of a component. Returns true if entries existed.
  bool erase(ComponentId id);

  /// Keys of stored entries whose search expanded any of the given vertices;
  /// sorted and unique.
  std::vector<SearchKey> readers(std::span<const Vertex> vertices);

  /// Aggregated collapsed and anchored followers; both sorted.
  std::pair<const std::vector<Vertex>&, const std::vector<Vertex>&>
  followers_of(Vertex x) const;
  const std::vector<Vertex>& collapsed_of(Vertex x) const;
  const std::vector<Vertex>& anchored_of(Vertex x) const;

  /// Re-folds x's aggregated sets from the per-component entries of the
  /// components x is a candidate of. Returns true if either set changed.
  bool refresh_aggregate(const Graph& g, const CorenessState& state,
                         const ShellIndex& index, Vertex x);
  /// Rebuilds every aggregated set from all stored entries.
  void rebuild_aggregates(std::size_t vertex_count);
  void add_vertex();

 private:
  struct Slot {
    std::vector<FollowerEntry>* entries;
    std::vector<std::uint32_t>* serials;
    std::size_t pos;
    bool found;
  };
  Slot locate(const SearchKey& key);
  std::optional<std::vector<Vertex>> take(const SearchKey& key);
  void retire_serial(std::uint32_t serial);
  std::uint32_t new_serial(const SearchKey& key, std::span<const Vertex> footprint);
  void compact();

  std::unordered_map<ComponentId, ComponentFollowers> per_component_;
  std::vector<std::vector<Vertex>> collapsed_;
  std::vector<std::vector<Vertex>> anchored_;

  // Footprints. Each entry has a serial, aligned with the entry lists in
  // serials_; key_of_ / live_ are indexed by serial and readers_[v] lists the
  // serials of searches that expanded v, compacted lazily.
  struct Serials {
    std::vector<std::uint32_t> collapsed;
    std::vector<std::uint32_t> anchored;
  };
  std::unordered_map<ComponentId, Serials> serials_;
  std::vector<SearchKey> key_of_;
  std::vector<char> live_;
  std::size_t live_count_ = 0;
  std::vector<std::vector<std::uint32_t>> readers_;
};

enum class SearchMark : std::uint8_t { kUnexplored = 0, kDiscarded, kSurvived };

/// Scratch state for one follower search. Reads coreness, layers and
/// higher supports from a frozen CorenessState and keeps every adjustment
/// local; reset() restores a clean overlay in time proportional to what
/// the last search touched. One instance per worker thread.
class SupportOverlay {
 public:
  explicit SupportOverlay(const CorenessState& base);

  const CorenessState& base() const noexcept { return *base_; }

  std::int64_t higher_support(Vertex v) const {
    return static_cast<std::int64_t>(base_->higher_support[v]) + delta_[v];
  }
  void adjust_support(Vertex v, std::int32_t delta) {
    touch(v);
    delta_[v] += delta;
  }

  SearchMark mark(Vertex v) const { return mark_[v]; }
  void set_mark(Vertex v, SearchMark m) {
    touch(v);
    mark_[v] = m;
  }

  bool queued(Vertex v) const { return queued_[v] != 0; }
  void set_queued(Vertex v, bool q) {
    touch(v);
    queued_[v] = q;
  }

  std::int64_t& degree_bound(Vertex v) {
    touch(v);
    return bound_[v];
  }

  /// Vertices modified since the last reset.
  std::span<const Vertex> touched() const noexcept { return touched_; }
  bool was_touched(Vertex v) const { return touched_flag_[v] != 0; }

  void reset();

 private:
  void touch(Vertex v) {
    if (!touched_flag_[v]) {
      touched_flag_[v] = 1;
      touched_.push_back(v);
    }
  }

  const CorenessState* base_;
  std::vector<std::int32_t> delta_;
  std::vector<SearchMark> mark_;
  std::vector<char> queued_;
  std::vector<std::int64_t> bound_;
  std::vector<char> touched_flag_;
  std::vector<Vertex> touched_;
};

/// Thrown when a search is asked for a vertex outside the candidate set.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Members of S (other than x) whose coreness drops when x is collapsed.
/// Requires x in S.collapser_candidates. overlay must be clean on entry and
/// is reset on return.
/// When footprint is given it receives the vertices the search expanded.
std::vector<Vertex> find_collapsed_followers(
    const Graph& g, const ShellIndex& index, const ShellComponent& component,
    Vertex x, SupportOverlay& overlay,
    std::vector<Vertex>* footprint = nullptr);

struct AnchoredSearchCounters {
  std::size_t pops = 0;
  std::size_t shrink_discards = 0;  // survived vertices later discarded
};

/// Members of S (other than x) whose coreness rises when x is anchored.
/// Requires x in S.anchor_candidates. Explores members in ascending layer
/// order from x and discards with a cascading shrink.
std::vector<Vertex> find_anchored_followers(
    const Graph& g, const ShellIndex& index, const ShellComponent& component,
    Vertex x, SupportOverlay& overlay,
    AnchoredSearchCounters* counters = nullptr,
    std::vector<Vertex>* footprint = nullptr);

/// Runs both searches for every candidate of one component.
ComponentFollowers compute_component_followers(const Graph& g,
                                               const ShellIndex& index,
                                               const ShellComponent& component,
                                               SupportOverlay& overlay);

struct ParallelOptions {
  /// 0 means std::thread::hardware_concurrency().
  unsigned threads = 0;
};

unsigned resolve_threads(unsigned requested);

struct SearchResult {
  std::vector<Vertex> followers;
  std::vector<Vertex> footprint;
};

/// Runs the given searches, handed out to workers dynamically. Results are
/// in the order of keys.
std::vector<SearchResult> run_searches(const Graph& g, const CorenessState& state,
                                       const ShellIndex& index,
                                       std::span<const SearchKey> keys,
                                       const ParallelOptions& options = {});

/// Computes entries for every component in dirty and stores them, replacing
/// older entries for the same ids. Aggregated sets are not touched.
void compute_all_followers(const Graph& g, const CorenessState& state,
                           const ShellIndex& index,
                           std::span<const ComponentId> dirty,
                           FollowerStore& store,
                           const ParallelOptions& options = {});

/// Offline pipeline tail: entries for all live components, then aggregates.
FollowerStore compute_offline_followers(const Graph& g,
                                        const CorenessState& state,
                                        const ShellIndex& index,
                                        const ParallelOptions& options = {});

}  // namespace kfollow
