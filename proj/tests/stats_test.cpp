#include <gtest/gtest.h>

#include "kfollow/maintenance.hpp"
#include "kfollow/stats.hpp"
#include "support.hpp"

namespace kfollow {
namespace {

StatsReport stats_of(const Graph& g) {
  Engine e(g, EngineOptions{{1}, CoreMaintenance::kTraversal});
  return compute_stats(e.graph(), e.state(), e.store());
}

TEST(CorenessBuckets, SmallRangeUsesUnitWidth) {
  auto b = coreness_buckets(7);
  ASSERT_EQ(b.size(), 7u);
  for (Coreness i = 0; i < 7; ++i) EXPECT_EQ(b[i], std::make_pair(i, i + 1));
}

TEST(CorenessBuckets, ExactMultiple) {
  auto b = coreness_buckets(40);
  ASSERT_EQ(b.size(), 20u);
  EXPECT_EQ(b.front(), std::make_pair(Coreness{0}, Coreness{2}));
  EXPECT_EQ(b.back(), std::make_pair(Coreness{38}, Coreness{40}));
}

TEST(CorenessBuckets, RemainderJoinsLastBucket) {
  auto b = coreness_buckets(45);
  ASSERT_EQ(b.size(), 20u);
  EXPECT_EQ(b[18], std::make_pair(Coreness{36}, Coreness{38}));
  EXPECT_EQ(b.back(), std::make_pair(Coreness{38}, Coreness{45}));
  for (std::size_t i = 1; i < b.size(); ++i) EXPECT_EQ(b[i].first, b[i - 1].second);
}

TEST(CorenessBuckets, CoverWithoutOverlap) {
  for (Coreness k = 1; k < 300; ++k) {
    auto b = coreness_buckets(k);
    ASSERT_FALSE(b.empty());
    EXPECT_LE(b.size(), 20u);
    EXPECT_EQ(b.front().first, 0u);
    EXPECT_EQ(b.back().second, k);
    for (std::size_t i = 1; i < b.size(); ++i) EXPECT_EQ(b[i].first, b[i - 1].second);
  }
  EXPECT_TRUE(coreness_buckets(0).empty());
}

TEST(Stats, TrianglePendant) {
  auto r = stats_of(testing::triangle_pendant());
  EXPECT_DOUBLE_EQ(r.valid_collapser_pct, 75.0);
  EXPECT_DOUBLE_EQ(r.valid_anchor_pct, 0.0);
  EXPECT_EQ(r.max_coreness, 2u);
  EXPECT_EQ(r.max_degree, 3u);
  EXPECT_DOUBLE_EQ(r.average_degree, 2.0);
  ASSERT_EQ(r.histogram.size(), 2u);
  EXPECT_EQ(r.histogram[0].vertices, 1u);
  EXPECT_DOUBLE_EQ(r.histogram[0].mean_collapsed, 0.0);
  EXPECT_EQ(r.histogram[1].vertices, 3u);
  // a drops b, c, d; b and c each drop the other two.
  EXPECT_DOUBLE_EQ(r.histogram[1].mean_collapsed, 7.0 / 3.0);
}

TEST(Stats, NoEdges) {
  auto r = stats_of(testing::parse("a a\nb b\n"));
  EXPECT_EQ(r.vertex_count, 2u);
  EXPECT_DOUBLE_EQ(r.valid_collapser_pct, 0.0);
  EXPECT_DOUBLE_EQ(r.valid_anchor_pct, 0.0);
  EXPECT_TRUE(r.histogram.empty());
}

TEST(Stats, ApexGraphHasAnchor) {
  auto r = stats_of(testing::parse("a b\na c\na d\nb c\nb d\nc e\nd e\n"));
  EXPECT_GT(r.valid_anchor_pct, 0.0);
  EXPECT_LE(r.valid_anchor_pct, 100.0);
}

TEST(SummarizeCounts, Basics) {
  std::vector<std::size_t> v{4, 1, 7};
  auto s = summarize_counts(v);
  EXPECT_EQ(s.count, 3u);
  EXPECT_EQ(s.min, 1u);
  EXPECT_EQ(s.max, 7u);
  EXPECT_DOUBLE_EQ(s.mean, 4.0);
  EXPECT_EQ(summarize_counts({}).count, 0u);
}

}  // namespace
}  // namespace kfollow
