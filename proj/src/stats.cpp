#include "kfollow/stats.hpp"

#include <algorithm>
#include <numeric>

namespace kfollow {

std::vector<std::pair<Coreness, Coreness>> coreness_buckets(Coreness k_max) {
  constexpr Coreness kBuckets = 20;
  std::vector<std::pair<Coreness, Coreness>> out;
  if (k_max == 0) return out;
  const Coreness width = std::max<Coreness>(1, k_max / kBuckets);
  const Coreness count = std::min(kBuckets, k_max / width);
  for (Coreness i = 0; i < count; ++i) {
    out.emplace_back(i * width, (i + 1) * width);
  }
  out.back().second = k_max;
  return out;
}

StatsReport compute_stats(const Graph& g, const CorenessState& state,
                          const FollowerStore& store) {
  StatsReport r;
  const std::size_t n = g.vertex_count();
  r.vertex_count = n;
  r.edge_count = g.edge_count();
  r.average_degree = n == 0 ? 0.0 : 2.0 * static_cast<double>(g.edge_count()) / n;
  for (Vertex u = 0; u < n; ++u) r.max_degree = std::max(r.max_degree, g.degree(u));
  r.max_coreness = state.max_coreness();

  std::size_t valid_collapsers = 0;
  std::size_t valid_anchors = 0;
  for (Vertex u = 0; u < n; ++u) {
    valid_collapsers += !store.collapsed_of(u).empty();
    valid_anchors += !store.anchored_of(u).empty();
  }
  if (n > 0) {
    r.valid_collapser_pct = 100.0 * static_cast<double>(valid_collapsers) / n;
    r.valid_anchor_pct = 100.0 * static_cast<double>(valid_anchors) / n;
  }

  auto bounds = coreness_buckets(r.max_coreness);
  r.histogram.resize(bounds.size());
  std::vector<double> collapsed_sum(bounds.size(), 0.0);
  std::vector<double> anchored_sum(bounds.size(), 0.0);
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    r.histogram[i].lower = bounds[i].first;
    r.histogram[i].upper = bounds[i].second;
  }
  for (Vertex u = 0; u < n; ++u) {
    Coreness c = state.coreness[u];
    if (c == 0) continue;
    auto it = std::lower_bound(
        bounds.begin(), bounds.end(), c,
        [](const std::pair<Coreness, Coreness>& b, Coreness v) { return b.second < v; });
    auto i = static_cast<std::size_t>(it - bounds.begin());
    ++r.histogram[i].vertices;
    collapsed_sum[i] += static_cast<double>(store.collapsed_of(u).size());
    anchored_sum[i] += static_cast<double>(store.anchored_of(u).size());
  }
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (r.histogram[i].vertices == 0) continue;
    double count = static_cast<double>(r.histogram[i].vertices);
    r.histogram[i].mean_collapsed = collapsed_sum[i] / count;
    r.histogram[i].mean_anchored = anchored_sum[i] / count;
  }
  return r;
}

CountSummary summarize_counts(std::span<const std::size_t> values) {
  CountSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  s.mean = static_cast<double>(std::accumulate(values.begin(), values.end(),
                                               std::size_t{0})) /
           static_cast<double>(values.size());
  return s;
}

}  // namespace kfollow
