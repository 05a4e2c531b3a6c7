#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cfp {

// Signed adjacency of a directed graph: A(i,j) = +1 when edge i->j leaves i,
// -1 when edge j->i enters i, 0 otherwise. Skew-symmetric by construction.
class SignedAdjacency {
 public:
  SignedAdjacency() = default;
  explicit SignedAdjacency(std::size_t n) : n_(n), a_(n * n, 0) {}

  std::size_t size() const { return n_; }
  int operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  // Sets A(i,j) = value and A(j,i) = -value.
  void set_edge(std::size_t i, std::size_t j, int value);
  void clear() { std::fill(a_.begin(), a_.end(), std::int8_t{0}); }

  std::size_t out_degree(std::size_t i) const;
  std::size_t in_degree(std::size_t i) const;
  std::size_t nonzeros(std::size_t i) const { return out_degree(i) + in_degree(i); }
  // Directed edges (i, j) with A(i,j) = +1, ordered by (i, j).
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

  friend bool operator==(const SignedAdjacency&, const SignedAdjacency&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::int8_t> a_;
};

struct GraphGenOptions {
  std::size_t max_attempts = 1000;
  // Probability of a 1 in each random 0-1 draw.
  double edge_probability = 0.5;
  // Cap on draws inside each of the two rejection loops of one row.
  std::size_t max_draws = 10'000;
};

// Random connected directed graph; every row has >= 3 nonzeros and both signs.
// Deterministic in seed. Throws TooSmall (n < 4) or GenerationFailed.
SignedAdjacency generate_graph(std::size_t n, std::uint64_t seed, const GraphGenOptions& options = {});

bool is_connected(const SignedAdjacency& a);

// Description of the first violated invariant, or nullopt.
std::optional<std::string> invariant_violation(const SignedAdjacency& a);

// (u, o): most out-edges and most in-edges, lowest index on ties; when they
// coincide the sink moves to the next-best in-degree node.
std::pair<std::size_t, std::size_t> pick_source_sink(const SignedAdjacency& a);

}  // namespace cfp
