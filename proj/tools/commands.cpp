#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "kfollow/generators.hpp"

namespace kfollow::cli {

using json = nlohmann::ordered_json;

namespace {

enum class Format { kTsv, kJson };

struct Options {
  std::string input;
  std::string ops;
  std::string output;
  std::string histogram;
  std::string vertex;
  std::optional<Format> format;
  unsigned threads = 0;
  bool all = false;
  CoreMaintenance core = CoreMaintenance::kTraversal;

  // generate
  std::string model = "chung-lu";
  std::size_t vertices = 1000;
  double degree = 6.0;
  double exponent = 2.5;
  std::uint64_t seed = 1;
  std::string ops_output;
  std::size_t events = 200;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Writes to --output when given, otherwise to the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      out_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw std::runtime_error("cannot open " + path + " for writing");
    out_ = file_.get();
  }
  std::ostream& operator*() { return *out_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* out_;
};

Format format_or(const Options& o, Format fallback) { return o.format.value_or(fallback); }

Graph load_input(const Options& o) { return load_edge_list_file(o.input); }

std::vector<StreamOp> load_ops(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_ops(in);
}

EngineOptions engine_options(const Options& o) {
  return EngineOptions{ParallelOptions{o.threads}, o.core};
}

// Unknown labels are new isolated vertices on insert; a removal naming one
// cannot touch any edge.
UpdateReport apply_op(Engine& e, const StreamOp& op) {
  const Graph& g = e.graph();
  Vertex u = g.find(op.u);
  Vertex v = g.find(op.v);
  if (op.op == EdgeOp::kInsert) {
    if (u == g.vertex_count()) u = e.add_vertex(op.u);
    if (v == g.vertex_count() && op.v != op.u) v = e.add_vertex(op.v);
    if (op.v == op.u) v = u;
    return e.apply(op.op, u, v);
  }
  if (u == g.vertex_count() || v == g.vertex_count()) {
    UpdateReport r;
    r.op = op.op;
    r.u = u;
    r.v = v;
    return r;
  }
  return e.apply(op.op, u, v);
}

std::string endpoint_label(const Graph& g, Vertex v, const std::string& fallback) {
  return v < g.vertex_count() ? g.label(v) : fallback;
}

json labels_json(const Graph& g, std::span<const Vertex> vs) {
  return json(sorted_labels(g, vs));
}

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += ',';
    out += p;
  }
  return out;
}

json summary_json(const CountSummary& s) {
  return {{"count", s.count}, {"min", s.min}, {"mean", s.mean}, {"max", s.max}};
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------

int cmd_decompose(const Options& o, std::ostream& out) {
  Engine e(load_input(o), EngineOptions{ParallelOptions{1}, o.core});
  Sink sink(o.output, out);
  if (format_or(o, Format::kTsv) == Format::kJson) {
    *sink << decompose_json(e).dump(2) << '\n';
  } else {
    write_decompose_tsv(e, *sink);
  }
  return 0;
}

int cmd_followers(const Options& o, std::ostream& out) {
  if (o.all == !o.vertex.empty()) {
    throw UsageError("followers needs exactly one of --vertex or --all");
  }
  Engine e(load_input(o), engine_options(o));
  std::vector<Vertex> selected;
  if (o.all) {
    selected.resize(e.graph().vertex_count());
    for (Vertex v = 0; v < selected.size(); ++v) selected[v] = v;
  } else {
    Vertex v = e.graph().find(o.vertex);
    if (v == e.graph().vertex_count()) {
      throw std::runtime_error("unknown vertex label '" + o.vertex + "'");
    }
    selected.push_back(v);
  }
  Sink sink(o.output, out);
  if (format_or(o, Format::kJson) == Format::kTsv) {
    write_followers_tsv(e, selected, *sink);
  } else {
    *sink << followers_json(e, selected).dump(2) << '\n';
  }
  return 0;
}

int cmd_stream(const Options& o, std::ostream& out) {
  auto ops = load_ops(o.ops);
  Engine e(load_input(o), engine_options(o));
  Sink sink(o.output, out);
  std::vector<std::size_t> updated;
  std::size_t applied = 0;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    UpdateReport r = apply_op(e, ops[i]);
    json line = {{"event", i + 1}};
    line.update(report_json(e.graph(), r));
    line["u"] = endpoint_label(e.graph(), r.u, ops[i].u);
    line["v"] = endpoint_label(e.graph(), r.v, ops[i].v);
    *sink << line.dump() << '\n';
    if (r.applied) ++applied;
    updated.push_back(r.updated_follower_vertices);
  }
  json summary = {{"events", ops.size()},
                  {"applied", applied},
                  {"vertices", e.graph().vertex_count()},
                  {"edges", e.graph().edge_count()},
                  {"updated_follower_vertices", summary_json(summarize_counts(updated))},
                  {"state", state_json(e)}};
  *sink << json{{"summary", summary}}.dump() << '\n';
  return 0;
}

int cmd_stats(const Options& o, std::ostream& out) {
  Engine e(load_input(o), engine_options(o));
  StatsReport offline = compute_stats(e.graph(), e.state(), e.store());
  json j = stats_json(offline);
  if (!o.ops.empty()) {
    std::vector<std::size_t> updated;
    for (const auto& op : load_ops(o.ops)) {
      UpdateReport r = apply_op(e, op);
      if (r.applied) updated.push_back(r.updated_follower_vertices);
    }
    j["updated_follower_vertices"] = summary_json(summarize_counts(updated));
  }
  if (!o.histogram.empty()) {
    Sink hist(o.histogram, out);
    write_histogram_tsv(offline, *hist);
  }
  Sink sink(o.output, out);
  if (format_or(o, Format::kJson) == Format::kTsv) {
    write_histogram_tsv(offline, *sink);
  } else {
    *sink << j.dump(2) << '\n';
  }
  return 0;
}

int cmd_bench(const Options& o, std::ostream& out) {
  const Graph g = load_input(o);
  const std::vector<StreamOp> ops = o.ops.empty() ? std::vector<StreamOp>{} : load_ops(o.ops);
  const unsigned workers = resolve_threads(o.threads);

  json offline = json::array();
  std::optional<std::vector<std::pair<std::vector<Vertex>, std::vector<Vertex>>>> reference;
  bool identical = true;
  double offline_at_workers = 0.0;
  for (unsigned t = 1; t <= workers; ++t) {
    Graph copy = g;
    auto start = std::chrono::steady_clock::now();
    Engine e(std::move(copy), EngineOptions{ParallelOptions{t}, o.core});
    double secs = seconds_since(start);
    offline.push_back({{"threads", t}, {"seconds", secs}});
    if (t == workers) offline_at_workers = secs;
    std::vector<std::pair<std::vector<Vertex>, std::vector<Vertex>>> sets;
    sets.reserve(g.vertex_count());
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
      auto [c, a] = e.followers_of(v);
      sets.emplace_back(c, a);
    }
    if (!reference) {
      reference = std::move(sets);
    } else {
      identical = identical && *reference == sets;
    }
  }

  json j = {{"vertices", g.vertex_count()},
            {"edges", g.edge_count()},
            {"threads", workers},
            {"offline", offline},
            {"identical_across_threads", identical}};

  if (!ops.empty()) {
    Engine e(g, EngineOptions{ParallelOptions{workers}, o.core});
    std::vector<double> times;
    std::vector<std::size_t> updated;
    for (const auto& op : ops) {
      auto start = std::chrono::steady_clock::now();
      UpdateReport r = apply_op(e, op);
      times.push_back(seconds_since(start));
      updated.push_back(r.updated_follower_vertices);
    }
    double mean = 0.0;
    for (double t : times) mean += t;
    mean /= static_cast<double>(times.size());
    auto [lo, hi] = std::minmax_element(times.begin(), times.end());
    j["events"] = {{"count", times.size()},
                   {"min_seconds", *lo},
                   {"mean_seconds", mean},
                   {"max_seconds", *hi}};
    j["updated_follower_vertices"] = summary_json(summarize_counts(updated));
    j["speedup"] = mean > 0.0 ? offline_at_workers / mean : 0.0;
  }
  Sink sink(o.output, out);
  *sink << j.dump(2) << '\n';
  return 0;
}

int cmd_generate(const Options& o, std::ostream& out) {
  Graph g;
  if (o.model == "er") {
    double p = o.vertices > 1 ? o.degree / static_cast<double>(o.vertices - 1) : 0.0;
    g = generators::erdos_renyi(o.vertices, std::min(p, 1.0), o.seed);
  } else if (o.model == "chung-lu") {
    g = generators::chung_lu(o.vertices, o.degree, o.exponent, o.seed);
  } else {
    throw UsageError("unknown model '" + o.model + "'");
  }
  {
    Sink sink(o.output, out);
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
      if (g.degree(v) == 0) *sink << g.label(v) << ' ' << g.label(v) << '\n';
    }
    for (auto [u, v] : g.edges()) *sink << g.label(u) << ' ' << g.label(v) << '\n';
  }
  if (o.ops_output.empty()) return 0;

  // Half the events remove existing edges, the other half insert new ones.
  std::ofstream ops(o.ops_output);
  if (!ops) throw std::runtime_error("cannot open " + o.ops_output + " for writing");
  std::mt19937_64 rng(o.seed ^ 0x9e3779b97f4a7c15ULL);
  auto edges = g.edges();
  std::shuffle(edges.begin(), edges.end(), rng);
  const std::size_t removes = std::min(o.events / 2, edges.size());
  std::set<std::pair<Vertex, Vertex>> taken(edges.begin(), edges.end());
  for (std::size_t i = 0; i < removes; ++i) {
    ops << "- " << g.label(edges[i].first) << ' ' << g.label(edges[i].second) << '\n';
  }
  const std::size_t n = g.vertex_count();
  const std::size_t max_pairs = n * (n - (n > 0)) / 2;
  std::size_t inserts = std::min(o.events - removes, max_pairs - taken.size());
  std::uniform_int_distribution<Vertex> pick(0, n > 0 ? static_cast<Vertex>(n - 1) : 0);
  while (inserts > 0) {
    Vertex u = pick(rng), v = pick(rng);
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (!taken.emplace(u, v).second) continue;
    ops << "+ " << g.label(u) << ' ' << g.label(v) << '\n';
    --inserts;
  }
  return 0;
}

void add_format(CLI::App* cmd, Options& o) {
  static const std::map<std::string, Format> kFormats{{"tsv", Format::kTsv},
                                                       {"json", Format::kJson}};
  cmd->add_option("--format", o.format, "Output format: tsv or json")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case).description(""))
      ->option_text("tsv|json");
}

void add_core_mode(CLI::App* cmd, Options& o) {
  static const std::map<std::string, CoreMaintenance> kModes{
      {"traversal", CoreMaintenance::kTraversal},
      {"recompute", CoreMaintenance::kRecompute}};
  cmd->add_option("--core-maintenance", o.core,
                  "Coreness update after an edge event: traversal or recompute")
      ->transform(CLI::CheckedTransformer(kModes, CLI::ignore_case).description(""))
      ->option_text("traversal|recompute");
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<StreamOp> parse_ops(std::istream& in) {
  std::vector<StreamOp> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::istringstream tokens(line);
    std::string sign;
    if (!(tokens >> sign) || sign[0] == '#') continue;
    StreamOp op{EdgeOp::kInsert, {}, {}};
    if (sign == "+") {
      op.op = EdgeOp::kInsert;
    } else if (sign == "-") {
      op.op = EdgeOp::kRemove;
    } else {
      throw ParseError(number, "expected '+' or '-', got '" + sign + "'");
    }
    std::string extra;
    if (!(tokens >> op.u >> op.v) || (tokens >> extra)) {
      throw ParseError(number, "expected '<+|-> <u> <v>'");
    }
    out.push_back(std::move(op));
  }
  return out;
}

bool label_less(const std::string& a, const std::string& b) {
  auto numeric = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(),
                                     [](unsigned char c) { return std::isdigit(c); });
  };
  const bool na = numeric(a), nb = numeric(b);
  if (na != nb) return na;
  if (na) {
    auto strip = [](const std::string& s) {
      std::size_t i = s.find_first_not_of('0');
      return i == std::string::npos ? std::string("0") : s.substr(i);
    };
    std::string sa = strip(a), sb = strip(b);
    if (sa.size() != sb.size()) return sa.size() < sb.size();
    if (sa != sb) return sa < sb;
  }
  return a < b;
}

std::vector<std::string> sorted_labels(const Graph& g, std::span<const Vertex> vs) {
  std::vector<std::string> out;
  out.reserve(vs.size());
  for (Vertex v : vs) out.push_back(g.label(v));
  std::sort(out.begin(), out.end(), label_less);
  return out;
}

void write_decompose_tsv(const Engine& e, std::ostream& out) {
  const Graph& g = e.graph();
  const CorenessState& s = e.state();
  out << "vertex\tcoreness\tlayer\thigher_support\tcomponent\n";
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    out << g.label(v) << '\t' << s.coreness[v] << '\t' << s.layer[v] << '\t'
        << s.higher_support[v] << '\t' << e.index().owner(v) << '\n';
  }
}

json decompose_json(const Engine& e) {
  const Graph& g = e.graph();
  const CorenessState& s = e.state();
  json rows = json::array();
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    rows.push_back({{"vertex", g.label(v)},
                    {"coreness", s.coreness[v]},
                    {"layer", s.layer[v]},
                    {"higher_support", s.higher_support[v]},
                    {"component", e.index().owner(v)}});
  }
  return {{"vertices", g.vertex_count()},
          {"edges", g.edge_count()},
          {"max_coreness", s.max_coreness()},
          {"rows", rows}};
}

json followers_json(const Engine& e, std::span<const Vertex> selected) {
  json rows = json::array();
  for (Vertex v : selected) {
    auto [c, a] = e.followers_of(v);
    rows.push_back({{"vertex", e.graph().label(v)},
                    {"collapsed", labels_json(e.graph(), c)},
                    {"anchored", labels_json(e.graph(), a)}});
  }
  return rows;
}

void write_followers_tsv(const Engine& e, std::span<const Vertex> selected,
                         std::ostream& out) {
  out << "vertex\tcollapsed_count\tanchored_count\tcollapsed\tanchored\n";
  for (Vertex v : selected) {
    auto [c, a] = e.followers_of(v);
    out << e.graph().label(v) << '\t' << c.size() << '\t' << a.size() << '\t'
        << join(sorted_labels(e.graph(), c)) << '\t'
        << join(sorted_labels(e.graph(), a)) << '\n';
  }
}

json report_json(const Graph& g, const UpdateReport& r) {
  json changed = json::array();
  for (const auto& c : r.coreness_changed) {
    changed.push_back({{"vertex", g.label(c.vertex)}, {"before", c.before}, {"after", c.after}});
  }
  return {{"op", r.op == EdgeOp::kInsert ? "+" : "-"},
          {"u", endpoint_label(g, r.u, "")},
          {"v", endpoint_label(g, r.v, "")},
          {"applied", r.applied},
          {"coreness_changed", changed},
          {"retired_components", r.retired_components},
          {"new_components", r.new_components},
          {"recomputed_components", r.recomputed_components},
          {"updated_follower_vertices", r.updated_follower_vertices}};
}

json state_json(const Engine& e) {
  const Graph& g = e.graph();
  const CorenessState& s = e.state();
  json rows = json::array();
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    auto [c, a] = e.followers_of(v);
    rows.push_back({{"vertex", g.label(v)},
                    {"coreness", s.coreness[v]},
                    {"layer", s.layer[v]},
                    {"higher_support", s.higher_support[v]},
                    {"collapsed", labels_json(g, c)},
                    {"anchored", labels_json(g, a)}});
  }
  return rows;
}

json stats_json(const StatsReport& r) {
  json buckets = json::array();
  for (const auto& b : r.histogram) {
    buckets.push_back({{"lower_exclusive", b.lower},
                       {"upper", b.upper},
                       {"vertices", b.vertices},
                       {"mean_collapsed", b.mean_collapsed},
                       {"mean_anchored", b.mean_anchored}});
  }
  return {{"vertices", r.vertex_count},
          {"edges", r.edge_count},
          {"average_degree", r.average_degree},
          {"max_degree", r.max_degree},
          {"max_coreness", r.max_coreness},
          {"valid_collapser_pct", r.valid_collapser_pct},
          {"valid_anchor_pct", r.valid_anchor_pct},
          {"histogram", buckets}};
}

void write_histogram_tsv(const StatsReport& r, std::ostream& out) {
  out << "coreness_from\tcoreness_to\tvertices\tmean_collapsed\tmean_anchored\n";
  for (const auto& b : r.histogram) {
    out << b.lower + 1 << '\t' << b.upper << '\t' << b.vertices << '\t'
        << b.mean_collapsed << '\t' << b.mean_anchored << '\n';
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Collapsed and anchored followers of a graph's vertices, kept "
               "up to date under edge insertions and removals."};
  app.require_subcommand(1);
  Options o;

  auto input = [&](CLI::App* cmd) {
    cmd->add_option("--input", o.input, "Edge list: two labels per line")
        ->required()
        ->check(CLI::ExistingFile);
  };
  auto threads = [&](CLI::App* cmd) {
    cmd->add_option("--threads", o.threads, "Worker threads (default: all cores)");
  };
  auto output = [&](CLI::App* cmd) {
    cmd->add_option("--output", o.output, "Write here instead of stdout");
  };

  auto* decompose = app.add_subcommand("decompose", "Per-vertex coreness, layer, support, component");
  input(decompose);
  output(decompose);
  add_format(decompose, o);

  auto* followers = app.add_subcommand("followers", "Collapsed and anchored followers");
  input(followers);
  output(followers);
  threads(followers);
  followers->add_option("--vertex", o.vertex, "Report one vertex by label");
  followers->add_flag("--all", o.all, "Report every vertex");
  add_format(followers, o);

  auto* stream = app.add_subcommand("stream", "Apply edge events, one JSON report per line");
  input(stream);
  output(stream);
  threads(stream);
  add_core_mode(stream, o);
  stream->add_option("--ops", o.ops, "Events: '+ u v' or '- u v' per line")
      ->required()
      ->check(CLI::ExistingFile);

  auto* stats = app.add_subcommand("stats", "Valid collapser/anchor rates and coreness histogram");
  input(stats);
  output(stats);
  threads(stats);
  add_format(stats, o);
  add_core_mode(stats, o);
  stats->add_option("--histogram", o.histogram, "Also write the histogram TSV here");
  stats->add_option("--ops", o.ops, "Events whose updated-vertex counts are summarised")
      ->check(CLI::ExistingFile);

  auto* bench = app.add_subcommand("bench", "Offline vs per-event maintenance timing");
  input(bench);
  output(bench);
  threads(bench);
  add_core_mode(bench, o);
  bench->add_option("--ops", o.ops, "Events to time")->check(CLI::ExistingFile);

  auto* generate = app.add_subcommand("generate", "Write a seeded synthetic edge list");
  output(generate);
  generate->add_option("--model", o.model, "er or chung-lu")
      ->check(CLI::IsMember({"er", "chung-lu"}));
  generate->add_option("--vertices", o.vertices, "Vertex count");
  generate->add_option("--degree", o.degree, "Average degree");
  generate->add_option("--exponent", o.exponent, "Power-law exponent (chung-lu)");
  generate->add_option("--seed", o.seed, "Random seed");
  generate->add_option("--ops-output", o.ops_output,
                       "Also write an event file: half removals, half insertions");
  generate->add_option("--events", o.events, "Number of events for --ops-output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*decompose) return cmd_decompose(o, out);
    if (*followers) return cmd_followers(o, out);
    if (*stream) return cmd_stream(o, out);
    if (*stats) return cmd_stats(o, out);
    if (*bench) return cmd_bench(o, out);
    if (*generate) return cmd_generate(o, out);
  } catch (const UsageError& e) {
    err << "kfollow: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "kfollow: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"kfollow"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace kfollow::cli
