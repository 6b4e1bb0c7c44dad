#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kfollow/maintenance.hpp"
#include "kfollow/stats.hpp"

namespace kfollow::cli {

/// Entry point shared by the executable and the tests. Returns the exit
/// status; diagnostics go to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct StreamOp {
  EdgeOp op;
  std::string u;
  std::string v;
};

/// `+ u v` / `- u v` per line; blank lines and '#' comments skipped.
/// Throws ParseError naming the offending line.
std::vector<StreamOp> parse_ops(std::istream& in);

/// Label order used in every output: numeric labels by value, then others
/// lexicographically.
bool label_less(const std::string& a, const std::string& b);
std::vector<std::string> sorted_labels(const Graph& g, std::span<const Vertex> vs);

void write_decompose_tsv(const Engine& e, std::ostream& out);
nlohmann::ordered_json decompose_json(const Engine& e);

nlohmann::ordered_json followers_json(const Engine& e, std::span<const Vertex> selected);
void write_followers_tsv(const Engine& e, std::span<const Vertex> selected,
                         std::ostream& out);

nlohmann::ordered_json report_json(const Graph& g, const UpdateReport& r);
/// Final per-vertex state: coreness, layer, support and follower labels.
nlohmann::ordered_json state_json(const Engine& e);

nlohmann::ordered_json stats_json(const StatsReport& r);
void write_histogram_tsv(const StatsReport& r, std::ostream& out);

}  // namespace kfollow::cli
