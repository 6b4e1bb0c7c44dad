// End-to-end acceptance checks. Prints one PASS / FAIL / SKIP line per check
// and exits nonzero if any check failed.

#include <algorithm>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "kfollow/generators.hpp"
#include "kfollow/stats.hpp"
#include "support.hpp"

namespace {

using namespace kfollow;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  enum { kPass, kFail, kSkip } status;
  std::string detail;
};

int failures = 0;

void report(const char* name, const Outcome& o) {
  const char* tag = o.status == Outcome::kPass ? "PASS" : o.status == Outcome::kFail ? "FAIL" : "SKIP";
  if (o.status == Outcome::kFail) ++failures;
  std::printf("%s %s: %s\n", tag, name, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<Graph> offline_graphs() {
  std::vector<Graph> out;
  const std::size_t ns[] = {50, 100, 200};
  const double degrees[] = {2.0, 5.0, 10.0};
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::size_t n = ns[seed % 3];
    double d = degrees[(seed / 3) % 3];
    out.push_back(generators::erdos_renyi(n, d / static_cast<double>(n - 1), seed));
  }
  using namespace kfollow::testing;
  for (auto f : {triangle, path3, triangle_pendant, k4_minus_cd, k4, cycle5, star5,
                 two_triangles, with_isolated}) {
    out.push_back(f());
  }
  return out;
}

// Every follower set of every vertex, serialised.
std::string dump_followers(const Engine& e) {
  std::ostringstream s;
  for (Vertex x = 0; x < e.graph().vertex_count(); ++x) {
    auto [c, a] = e.followers_of(x);
    s << x << ':';
    for (Vertex u : c) s << ' ' << u;
    s << " |";
    for (Vertex u : a) s << ' ' << u;
    s << '\n';
  }
  return s.str();
}

std::vector<std::string> reference_dumps;

Outcome oracle_equivalence(const std::vector<Graph>& graphs) {
  auto start = Clock::now();
  std::size_t mismatches = 0, vertices = 0;
  for (const Graph& g : graphs) {
    Engine e(g, EngineOptions{ParallelOptions{1}});
    auto ref = oracle::sweep(g);
    for (Vertex x = 0; x < g.vertex_count(); ++x) {
      ++vertices;
      auto [c, a] = e.followers_of(x);
      if (c != ref.collapsed_followers[x] || a != ref.anchored_followers[x]) ++mismatches;
    }
    reference_dumps.push_back(dump_followers(e));
  }
  double secs = seconds_since(start);
  bool ok = mismatches == 0 && secs < 300.0;
  return {ok ? Outcome::kPass : Outcome::kFail,
          fmt("%zu graphs, %zu vertices, %zu mismatches, %.1f s (budget 300 s)",
              graphs.size(), vertices, mismatches, secs)};
}

Outcome maintenance_equivalence() {
  auto start = Clock::now();
  Graph g = generators::erdos_renyi(2000, 10.0 / 1999.0, 2024);
  const std::size_t edges = g.edge_count();
  std::mt19937_64 rng(7);
  auto existing = g.edges();
  std::shuffle(existing.begin(), existing.end(), rng);
  std::vector<std::pair<EdgeOp, std::pair<Vertex, Vertex>>> events;
  for (std::size_t i = 0; i < 100; ++i) events.push_back({EdgeOp::kRemove, existing[i]});
  std::uniform_int_distribution<Vertex> pick(0, 1999);
  std::set<std::pair<Vertex, Vertex>> inserted;
  while (events.size() < 200) {
    Vertex u = pick(rng), v = pick(rng);
    if (u > v) std::swap(u, v);
    if (u == v || g.has_edge(u, v) || !inserted.emplace(u, v).second) continue;
    events.push_back({EdgeOp::kInsert, {u, v}});
  }
  std::shuffle(events.begin(), events.end(), rng);

  Engine e(std::move(g), EngineOptions{ParallelOptions{1}});
  std::size_t mismatches = 0, applied = 0;
  for (const auto& [op, uv] : events) {
    applied += e.apply(op, uv.first, uv.second).applied;
    if (!(testing::canonical(e) == testing::offline_canonical(e.graph()))) ++mismatches;
  }
  double secs = seconds_since(start);
  bool ok = mismatches == 0 && applied == 200 && secs < 600.0;
  return {ok ? Outcome::kPass : Outcome::kFail,
          fmt("%zu edges, %zu events applied, %zu mismatching states, %.1f s (budget 600 s)",
              edges, applied, mismatches, secs)};
}

Outcome unit_change_and_locality(const std::vector<Graph>& graphs) {
  std::size_t violations = 0, followers = 0;
  for (const Graph& g : graphs) {
    Engine e(g, EngineOptions{ParallelOptions{1}});
    const auto& c = e.state().coreness;
    for (Vertex x = 0; x < g.vertex_count(); ++x) {
      auto collapsed = oracle::coreness_collapsing(g, x);
      auto anchored = oracle::coreness_anchoring(g, x);
      auto [cf, af] = e.followers_of(x);
      for (Vertex u : cf) {
        ++followers;
        const auto& owner = e.index().component_of(u);
        violations += collapsed[u] + 1 != c[u];
        violations += !std::binary_search(owner.collapser_candidates.begin(),
                                          owner.collapser_candidates.end(), x);
      }
      for (Vertex u : af) {
        ++followers;
        const auto& owner = e.index().component_of(u);
        violations += anchored[u] != c[u] + 1;
        violations += !std::binary_search(owner.anchor_candidates.begin(),
                                          owner.anchor_candidates.end(), x);
      }
      for (Vertex u = 0; u < g.vertex_count(); ++u) {
        if (u == x) continue;
        violations += c[u] - collapsed[u] > 1;
        violations += anchored[u] - c[u] > 1;
      }
    }
  }
  return {violations == 0 ? Outcome::kPass : Outcome::kFail,
          fmt("%zu graphs, %zu followers checked, %zu violations", graphs.size(),
              followers, violations)};
}

Outcome determinism(const std::vector<Graph>& graphs) {
  std::size_t differing = 0;
  for (unsigned w : {1u, 2u, 4u, 8u}) {
    for (std::size_t i = 0; i < graphs.size(); ++i) {
      Engine e(graphs[i], EngineOptions{ParallelOptions{w}});
      differing += dump_followers(e) != reference_dumps[i];
    }
  }
  return {differing == 0 ? Outcome::kPass : Outcome::kFail,
          fmt("%zu graphs at 1, 2, 4, 8 workers, %zu differing outputs", graphs.size(),
              differing)};
}

Graph large_graph() { return generators::chung_lu(50000, 7.0, 2.3, 11); }

double offline_seconds(const Graph& g, unsigned workers) {
  double best = 1e300;
  for (int rep = 0; rep < 2; ++rep) {
    Graph copy = g;
    auto start = Clock::now();
    Engine e(std::move(copy), EngineOptions{ParallelOptions{workers}});
    best = std::min(best, seconds_since(start));
  }
  return best;
}

Outcome maintenance_speedup(const Graph& g) {
  const double offline = offline_seconds(g, 1);
  Engine e(g, EngineOptions{ParallelOptions{1}});
  std::mt19937_64 rng(5);
  auto existing = g.edges();
  std::shuffle(existing.begin(), existing.end(), rng);
  std::uniform_int_distribution<Vertex> pick(0, static_cast<Vertex>(g.vertex_count() - 1));
  double total = 0.0;
  std::size_t events = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    auto [u, v] = existing[i];
    auto start = Clock::now();
    e.remove_edge(u, v);
    total += seconds_since(start);
    ++events;
    Vertex a, b;
    do {
      a = pick(rng);
      b = pick(rng);
    } while (a == b || e.graph().has_edge(a, b));
    start = Clock::now();
    e.insert_edge(a, b);
    total += seconds_since(start);
    ++events;
  }
  const double mean = total / static_cast<double>(events);
  const double ratio = offline / mean;
  return {ratio >= 100.0 && g.edge_count() >= 100000 ? Outcome::kPass : Outcome::kFail,
          fmt("%zu edges, offline %.3f s, mean event %.5f s over %zu events, speedup %.0fx "
              "(need 100x)",
              g.edge_count(), offline, mean, events, ratio)};
}

Outcome parallel_scaling(const Graph& g) {
  const double one = offline_seconds(g, 1);
  const double four = offline_seconds(g, 4);
  const double ratio = four / one;
  return {ratio <= 0.6 ? Outcome::kPass : Outcome::kFail,
          fmt("offline %.3f s at 1 worker, %.3f s at 4 workers, ratio %.2f (need <= 0.60), "
              "%u hardware threads",
              one, four, ratio, std::thread::hardware_concurrency())};
}

Outcome brightkite_percentages() {
  const char* path = std::getenv("KFOLLOW_BRIGHTKITE");
  if (path == nullptr || *path == '\0') {
    return {Outcome::kSkip, "set KFOLLOW_BRIGHTKITE to the edge list to run"};
  }
  std::ifstream in(path);
  if (!in) return {Outcome::kFail, fmt("cannot open %s", path)};
  Engine e(load_edge_list(in));
  StatsReport r = compute_stats(e.graph(), e.state(), e.store());
  bool ok = std::abs(r.valid_collapser_pct - 44.0) <= 2.0 &&
            std::abs(r.valid_anchor_pct - 70.0) <= 2.0;
  return {ok ? Outcome::kPass : Outcome::kFail,
          fmt("valid collapsers %.1f%% (want 44 +- 2), valid anchors %.1f%% (want 70 +- 2)",
              r.valid_collapser_pct, r.valid_anchor_pct)};
}

}  // namespace

int main() {
  const auto graphs = offline_graphs();
  report("oracle-equivalence", oracle_equivalence(graphs));
  report("maintenance-equivalence", maintenance_equivalence());
  report("unit-change-and-locality", unit_change_and_locality(graphs));
  report("worker-determinism", determinism(graphs));
  const Graph big = large_graph();
  report("maintenance-speedup", maintenance_speedup(big));
  report("parallel-scaling", parallel_scaling(big));
  report("brightkite-percentages", brightkite_percentages());
  return failures == 0 ? 0 : 1;
}
