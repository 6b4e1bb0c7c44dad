#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kfollow/core_decomp.hpp"
#include "kfollow/followers.hpp"
#include "kfollow/graph.hpp"

namespace kfollow {

/// Coreness interval (lower, upper] with the mean follower counts of the
/// vertices whose coreness falls in it.
struct CorenessBucket {
  Coreness lower = 0;  // exclusive
  Coreness upper = 0;  // inclusive
  std::size_t vertices = 0;
  double mean_collapsed = 0.0;
  double mean_anchored = 0.0;
};

struct StatsReport {
  std::size_t vertex_count = 0;
  std::size_t edge_count = 0;
  double average_degree = 0.0;
  std::size_t max_degree = 0;
  Coreness max_coreness = 0;
  double valid_collapser_pct = 0.0;
  double valid_anchor_pct = 0.0;
  std::vector<CorenessBucket> histogram;
};

/// Splits [1, k_max] into 20 intervals of width floor(k_max / 20) (width 1
/// and k_max intervals when k_max < 20); the leftover tail is merged into the
/// last interval. Returns (lower, upper] bounds.
std::vector<std::pair<Coreness, Coreness>> coreness_buckets(Coreness k_max);

StatsReport compute_stats(const Graph& g, const CorenessState& state,
                          const FollowerStore& store);

struct CountSummary {
  std::size_t count = 0;
  std::size_t min = 0;
  double mean = 0.0;
  std::size_t max = 0;
};

CountSummary summarize_counts(std::span<const std::size_t> values);

}  // namespace kfollow
