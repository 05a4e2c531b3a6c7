#include "cfp/graphgen.hpp"

#include <algorithm>
#include <queue>
#include <random>

#include "cfp/error.hpp"

namespace cfp {

void SignedAdjacency::set_edge(std::size_t i, std::size_t j, int value) {
  a_[i * n_ + j] = static_cast<std::int8_t>(value);
  a_[j * n_ + i] = static_cast<std::int8_t>(-value);
}

std::size_t SignedAdjacency::out_degree(std::size_t i) const {
  return static_cast<std::size_t>(std::count(a_.begin() + i * n_, a_.begin() + (i + 1) * n_, 1));
}

std::size_t SignedAdjacency::in_degree(std::size_t i) const {
  return static_cast<std::size_t>(std::count(a_.begin() + i * n_, a_.begin() + (i + 1) * n_, -1));
}

std::vector<std::pair<std::size_t, std::size_t>> SignedAdjacency::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      if ((*this)(i, j) == 1) out.emplace_back(i, j);
    }
  }
  return out;
}

namespace {

// Portable draws: std::*_distribution output is implementation-defined.
bool draw_bit(std::mt19937_64& rng, double p) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p;
}

// One pass of the row-by-row construction. Returns false when a rejection
// loop hits its draw cap.
bool build_rows(SignedAdjacency& a, std::mt19937_64& rng, const GraphGenOptions& opt) {
  const std::size_t n = a.size();
  a.clear();
  std::vector<int> x;
  for (std::size_t r = 0; r + 1 < n; ++r) {
    const std::size_t len = n - 1 - r;
    int fixed_pos = 0;
    int fixed_neg = 0;
    for (std::size_t c = 0; c < r; ++c) {
      fixed_pos += a(r, c) == 1;
      fixed_neg += a(r, c) == -1;
    }

    // Row degree: the fixed prefix plus the new draw needs more than 2 nonzeros.
    std::size_t draws = 0;
    std::size_t fresh = 0;
    do {
      if (draws++ == opt.max_draws) return false;
      x.assign(len, 0);
      fresh = 0;
      for (auto& e : x) {
        e = draw_bit(rng, opt.edge_probability) ? 1 : 0;
        fresh += static_cast<std::size_t>(e);
      }
    } while (static_cast<std::size_t>(fixed_pos + fixed_neg) + fresh <= 2);

    // Orientation: the whole row needs both an outgoing and an incoming edge.
    draws = 0;
    for (;;) {
      if (draws++ == opt.max_draws) return false;
      int pos = fixed_pos;
      int neg = fixed_neg;
      for (auto& e : x) {
        if (e == 0) continue;
        e = draw_bit(rng, 0.5) ? 1 : -1;
        (e > 0 ? pos : neg) += 1;
      }
      if (pos > 0 && neg > 0) break;
    }
    for (std::size_t c = 0; c < len; ++c) {
      if (x[c] != 0) a.set_edge(r, r + 1 + c, x[c]);
    }
  }
  return true;
}

}  // namespace

SignedAdjacency generate_graph(std::size_t n, std::uint64_t seed, const GraphGenOptions& options) {
  if (n < 4) throw Error(ErrorCode::TooSmall, "need at least 4 nodes, got " + std::to_string(n));
  if (options.max_attempts == 0 || !(options.edge_probability > 0.0 && options.edge_probability <= 1.0)) {
    throw Error(ErrorCode::GenerationFailed, "invalid generator options");
  }
  std::mt19937_64 rng(seed);
  SignedAdjacency a(n);
  for (std::size_t attempt = 0; attempt < options.max_attempts; ++attempt) {
    if (build_rows(a, rng, options) && !invariant_violation(a)) return a;
  }
  throw Error(ErrorCode::GenerationFailed,
              "no valid graph after " + std::to_string(options.max_attempts) + " attempts");
}

bool is_connected(const SignedAdjacency& a) {
  const std::size_t n = a.size();
  if (n == 0) return true;
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> q;
  q.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!q.empty()) {
    const std::size_t i = q.front();
    q.pop();
    for (std::size_t j = 0; j < n; ++j) {
      if (a(i, j) != 0 && !seen[j]) {
        seen[j] = true;
        ++reached;
        q.push(j);
      }
    }
  }
  return reached == n;
}

std::optional<std::string> invariant_violation(const SignedAdjacency& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (a(i, i) != 0) return "nonzero diagonal at row " + std::to_string(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (a(i, j) != -a(j, i)) return "not skew-symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")";
    }
    if (a.nonzeros(i) < 3) return "row " + std::to_string(i) + " has fewer than 3 nonzeros";
    if (a.out_degree(i) == 0 || a.in_degree(i) == 0) return "row " + std::to_string(i) + " lacks both signs";
  }
  if (!is_connected(a)) return std::string("graph is not connected");
  return std::nullopt;
}

std::pair<std::size_t, std::size_t> pick_source_sink(const SignedAdjacency& a) {
  const std::size_t n = a.size();
  std::size_t u = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (a.out_degree(i) > a.out_degree(u)) u = i;
  }
  std::size_t o = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == u) continue;
    if (o == n || a.in_degree(i) > a.in_degree(o)) o = i;
  }
  // o is the best in-degree node other than u; it is the overall argmax
  // unless u itself holds the (lowest-index) maximum, which is the collision rule.
  return {u, o};
}

}  // namespace cfp
