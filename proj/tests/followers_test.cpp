#include <gtest/gtest.h>

#include <map>

#include "kfollow/followers.hpp"
#include "kfollow/generators.hpp"
#include "kfollow/oracle.hpp"
#include "support.hpp"

namespace kfollow {
namespace {

using testing::id;
using testing::labels;
using LabelSet = testing::LabelSet;

struct Built {
  Graph g;
  CorenessState state;
  ShellIndex index;
  FollowerStore store;
};

Built build(Graph g, unsigned threads = 1) {
  Built b{std::move(g), {}, {}, {}};
  b.state = core_decompose(b.g);
  b.index = shell_decompose(b.g, b.state);
  b.store = compute_offline_followers(b.g, b.state, b.index, ParallelOptions{threads});
  return b;
}

std::vector<Graph> random_graphs() {
  std::vector<Graph> out;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    std::size_t n = 20 + (seed % 4) * 15;
    double d = 2.0 + static_cast<double>(seed % 5) * 1.5;
    out.push_back(generators::erdos_renyi(n, d / static_cast<double>(n - 1), seed));
  }
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    out.push_back(generators::chung_lu(150, 5.0, 2.3, 100 + seed));
  }
  return out;
}

TEST(CollapsedFollowers, TrianglePendant) {
  Built b = build(testing::triangle_pendant());
  const Graph& g = b.g;
  Vertex a = id(g, "a");
  const auto& s1 = b.index.component_of(id(g, "d"));
  const auto& s2 = b.index.component_of(a);
  SupportOverlay overlay(b.state);
  EXPECT_EQ(labels(g, find_collapsed_followers(g, b.index, s1, a, overlay)),
            (LabelSet{"d"}));
  EXPECT_EQ(labels(g, find_collapsed_followers(g, b.index, s2, a, overlay)),
            (LabelSet{"b", "c"}));
  EXPECT_EQ(labels(g, b.store.collapsed_of(a)), (LabelSet{"b", "c", "d"}));
  EXPECT_EQ(labels(g, oracle::collapsed_followers(g, a)),
            (LabelSet{"b", "c", "d"}));
}

TEST(CollapsedFollowers, K4MinusEdge) {
  Built b = build(testing::k4_minus_cd());
  Vertex a = id(b.g, "a");
  EXPECT_EQ(labels(b.g, b.store.collapsed_of(a)), (LabelSet{"b", "c", "d"}));
  EXPECT_EQ(labels(b.g, oracle::collapsed_followers(b.g, a)),
            (LabelSet{"b", "c", "d"}));
}

TEST(CollapsedFollowers, CycleLosesEveryone) {
  Built b = build(testing::cycle5());
  for (Vertex x = 0; x < 5; ++x) {
    EXPECT_EQ(b.store.collapsed_of(x).size(), 4u);
  }
}

TEST(CollapsedFollowers, RequiresCandidate) {
  Built b = build(testing::triangle_pendant());
  const auto& s1 = b.index.component_of(id(b.g, "d"));
  SupportOverlay overlay(b.state);
  EXPECT_THROW(find_collapsed_followers(b.g, b.index, s1, id(b.g, "b"), overlay),
               PreconditionError);
}

TEST(AnchoredFollowers, K4MinusEdge) {
  // d keeps only two neighbours besides c, so no 3-core can form.
  Built b = build(testing::k4_minus_cd());
  Vertex c = id(b.g, "c");
  EXPECT_TRUE(b.store.anchored_of(c).empty());
  EXPECT_TRUE(oracle::anchored_followers(b.g, c).empty());
}

TEST(AnchoredFollowers, K4MinusEdgeWithApex) {
  Graph g = testing::parse("a b\na c\na d\nb c\nb d\nc e\nd e\n");
  Built b = build(g);
  Vertex e = id(b.g, "e");
  EXPECT_EQ(labels(b.g, b.store.anchored_of(e)), (LabelSet{"a", "b", "c", "d"}));
  EXPECT_EQ(labels(b.g, oracle::anchored_followers(b.g, e)),
            (LabelSet{"a", "b", "c", "d"}));
}

TEST(AnchoredFollowers, TrianglePendantAnchorD) {
  Built b = build(testing::triangle_pendant());
  Vertex d = id(b.g, "d");
  EXPECT_TRUE(b.store.anchored_of(d).empty());
  EXPECT_TRUE(oracle::anchored_followers(b.g, d).empty());
}

TEST(AnchoredFollowers, PathAnchorEnd) {
  Built b = build(testing::path3());
  Vertex a = id(b.g, "a");
  EXPECT_TRUE(b.store.anchored_of(a).empty());
  EXPECT_TRUE(oracle::anchored_followers(b.g, a).empty());
}

TEST(AnchoredFollowers, CliqueCannotRise) {
  Built b = build(testing::k4());
  for (Vertex x = 0; x < 4; ++x) EXPECT_TRUE(b.store.anchored_of(x).empty());
}

TEST(AnchoredFollowers, ShrinkCascadesThroughSurvivors) {
  // Anchoring 4 first lets two members survive; a later discard undoes both.
  Graph g(6);
  std::vector<std::pair<Vertex, Vertex>> edges{{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5},
                                               {1, 3}, {1, 5}, {2, 3}, {2, 4}};
  g.insert_edges(edges);
  Built b = build(g);
  SupportOverlay overlay(b.state);
  AnchoredSearchCounters counters;
  const auto& s = b.index.component_of(0);
  auto found = find_anchored_followers(b.g, b.index, s, 4, overlay, &counters);
  EXPECT_EQ(counters.shrink_discards, 2u);
  EXPECT_TRUE(found.empty());
  EXPECT_EQ(found, oracle::anchored_followers(b.g, 4));
}

TEST(AnchoredFollowers, DiscardWithoutSurvivorsIsQuiet) {
  Built b = build(testing::path3());
  SupportOverlay overlay(b.state);
  AnchoredSearchCounters counters;
  const auto& s = b.index.component_of(0);
  EXPECT_TRUE(find_anchored_followers(b.g, b.index, s, 0, overlay, &counters).empty());
  EXPECT_EQ(counters.shrink_discards, 0u);
}

TEST(AnchoredFollowers, RequiresCandidate) {
  Built b = build(testing::triangle_pendant());
  const auto& s1 = b.index.component_of(id(b.g, "d"));
  SupportOverlay overlay(b.state);
  EXPECT_THROW(find_anchored_followers(b.g, b.index, s1, id(b.g, "a"), overlay),
               PreconditionError);
}

TEST(FollowersOf, Fixtures) {
  Built tp = build(testing::triangle_pendant());
  auto [col, anc] = tp.store.followers_of(id(tp.g, "a"));
  EXPECT_EQ(labels(tp.g, col), (LabelSet{"b", "c", "d"}));
  EXPECT_TRUE(anc.empty());

  Built k = build(testing::k4_minus_cd());
  auto [kc, ka] = k.store.followers_of(id(k.g, "c"));
  EXPECT_TRUE(kc.empty());
  EXPECT_TRUE(ka.empty());

  Built iso = build(testing::with_isolated());
  auto [zc, za] = iso.store.followers_of(id(iso.g, "z"));
  EXPECT_TRUE(zc.empty());
  EXPECT_TRUE(za.empty());
  EXPECT_THROW(iso.store.followers_of(42), std::out_of_range);
}

TEST(ComputeAllFollowers, TrianglePendantEntries) {
  Built b = build(testing::triangle_pendant());
  const Graph& g = b.g;
  ComponentId s1 = b.index.owner(id(g, "d"));
  ComponentId s2 = b.index.owner(id(g, "a"));
  for (const char* x : {"d", "a"}) EXPECT_NE(b.store.collapsed(id(g, x), s1), nullptr);
  for (const char* x : {"a", "b", "c"}) {
    EXPECT_NE(b.store.collapsed(id(g, x), s2), nullptr);
  }
  EXPECT_NE(b.store.anchored(id(g, "d"), s1), nullptr);
  for (const char* x : {"a", "b", "c", "d"}) {
    EXPECT_NE(b.store.anchored(id(g, x), s2), nullptr);
  }
  EXPECT_EQ(b.store.collapsed(id(g, "b"), s1), nullptr);
  EXPECT_EQ(b.store.anchored(id(g, "a"), s1), nullptr);
}

TEST(ComputeAllFollowers, EmptyDirtyLeavesStoreAlone) {
  Built b = build(testing::triangle_pendant());
  auto before = b.store.all_entries();
  compute_all_followers(b.g, b.state, b.index, {}, b.store);
  EXPECT_EQ(b.store.all_entries(), before);
}

TEST(ComputeAllFollowers, WorkerCountDoesNotMatter) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    Graph g = generators::chung_lu(600, 6.0, 2.4, seed);
    Built one = build(g, 1);
    for (unsigned w : {2u, 3u, 8u}) {
      Built many = build(g, w);
      EXPECT_EQ(many.store.all_entries(), one.store.all_entries());
      for (Vertex x = 0; x < g.vertex_count(); ++x) {
        EXPECT_EQ(many.store.followers_of(x), one.store.followers_of(x));
      }
    }
  }
}

TEST(Followers, MatchOracleOnRandomGraphs) {
  for (const Graph& g : random_graphs()) {
    Built b = build(g);
    auto ref = oracle::sweep(g);
    for (Vertex x = 0; x < g.vertex_count(); ++x) {
      ASSERT_EQ(b.store.collapsed_of(x), ref.collapsed_followers[x])
          << "collapse " << x << " n=" << g.vertex_count();
      ASSERT_EQ(b.store.anchored_of(x), ref.anchored_followers[x])
          << "anchor " << x << " n=" << g.vertex_count();
    }
  }
}

TEST(Followers, ExhaustiveSixVertexGraphs) {
  // Every graph on 6 labelled vertices: 2^15 edge subsets.
  std::vector<std::pair<Vertex, Vertex>> pairs;
  for (Vertex u = 0; u < 6; ++u) {
    for (Vertex v = u + 1; v < 6; ++v) pairs.emplace_back(u, v);
  }
  for (std::uint32_t mask = 0; mask < (1u << pairs.size()); ++mask) {
    Graph g(6);
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (mask >> i & 1) edges.push_back(pairs[i]);
    }
    g.insert_edges(edges);
    Built b = build(g);
    auto ref = oracle::sweep(g);
    for (Vertex x = 0; x < 6; ++x) {
      ASSERT_EQ(b.store.collapsed_of(x), ref.collapsed_followers[x]) << mask;
      ASSERT_EQ(b.store.anchored_of(x), ref.anchored_followers[x]) << mask;
    }
  }
}

TEST(Followers, UnitChangeAndLocality) {
  for (const Graph& g : random_graphs()) {
    Built b = build(g);
    const auto& c = b.state.coreness;
    for (Vertex x = 0; x < g.vertex_count(); ++x) {
      auto collapsed = oracle::coreness_collapsing(g, x);
      auto anchored = oracle::coreness_anchoring(g, x);
      for (Vertex u : b.store.collapsed_of(x)) EXPECT_EQ(collapsed[u] + 1, c[u]);
      for (Vertex u : b.store.anchored_of(x)) EXPECT_EQ(anchored[u], c[u] + 1);
      for (Vertex u = 0; u < g.vertex_count(); ++u) {
        if (u == x) continue;
        EXPECT_LE(c[u] - collapsed[u], 1u);
        EXPECT_LE(anchored[u] - c[u], 1u);
      }
      for (Vertex u : b.store.collapsed_of(x)) {
        const auto& owner = b.index.component_of(u);
        EXPECT_TRUE(std::binary_search(owner.collapser_candidates.begin(),
                                       owner.collapser_candidates.end(), x));
      }
      for (Vertex u : b.store.anchored_of(x)) {
        const auto& owner = b.index.component_of(u);
        EXPECT_TRUE(std::binary_search(owner.anchor_candidates.begin(),
                                       owner.anchor_candidates.end(), x));
      }
    }
  }
}

TEST(Followers, PerComponentEntriesStayInsideComponent) {
  Built b = build(generators::chung_lu(500, 6.0, 2.4, 77));
  for (const auto& [cid, entries] : b.store.all_entries()) {
    const ShellComponent* c = b.index.find(cid);
    ASSERT_NE(c, nullptr);
    for (const auto& e : entries.collapsed) {
      for (Vertex u : e.followers) {
        EXPECT_TRUE(c->contains(u));
        EXPECT_NE(u, e.candidate);
      }
    }
    for (const auto& e : entries.anchored) {
      for (Vertex u : e.followers) {
        EXPECT_TRUE(c->contains(u));
        EXPECT_NE(u, e.candidate);
      }
    }
  }
}

TEST(SupportOverlay, SearchesLeaveItClean) {
  Built b = build(testing::k4_minus_cd());
  SupportOverlay overlay(b.state);
  const auto& c = b.index.component_of(0);
  for (Vertex x : c.anchor_candidates) find_anchored_followers(b.g, b.index, c, x, overlay);
  for (Vertex v = 0; v < 4; ++v) {
    EXPECT_EQ(overlay.mark(v), SearchMark::kUnexplored);
    EXPECT_EQ(overlay.higher_support(v), b.state.higher_support[v]);
    EXPECT_FALSE(overlay.queued(v));
  }
}

}  // namespace
}  // namespace kfollow
