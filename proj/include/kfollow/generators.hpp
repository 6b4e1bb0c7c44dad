#pragma once

#include <cstddef>
#include <cstdint>

#include "kfollow/graph.hpp"

// Seeded synthetic graphs for tests and benchmarks. Labels are the decimal
// vertex ids.
namespace kfollow::generators {

/// G(n, p): every pair independently with probability p.
Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed);

/// G(n, m): m distinct edges drawn uniformly (m is capped at n(n-1)/2).
Graph uniform_edges(std::size_t n, std::size_t m, std::uint64_t seed);

/// Chung-Lu graph with power-law expected degrees w_i ~ (i + i0)^(-1/(exponent-1))
/// scaled to the requested average degree. Heavy-tailed like social
/// networks: many low-coreness vertices hanging off a dense core.
Graph chung_lu(std::size_t n, double average_degree, double exponent,
               std::uint64_t seed);

}  // namespace kfollow::generators
