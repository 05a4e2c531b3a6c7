#include "cfp/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cfp/error.hpp"

namespace cfp {

CouplingStructure CouplingStructure::build(std::vector<std::vector<VarId>> index_sets,
                                           std::size_t n_global) {
  CouplingStructure c;
  c.sharers_.resize(n_global);
  for (AgentId i = 0; i < index_sets.size(); ++i) {
    auto& set = index_sets[i];
    std::sort(set.begin(), set.end());
    for (std::size_t p = 0; p < set.size(); ++p) {
      if (set[p] >= n_global) {
        throw Error(ErrorCode::IndexOutOfRange, "agent " + std::to_string(i) + " references variable " +
                                                    std::to_string(set[p]));
      }
      if (p > 0 && set[p] == set[p - 1]) {
        throw Error(ErrorCode::DuplicateIndex, "agent " + std::to_string(i) + " lists variable " +
                                                   std::to_string(set[p]) + " twice");
      }
    }
  }

  c.offsets_.assign(1, 0);
  for (AgentId i = 0; i < index_sets.size(); ++i) {
    c.offsets_.push_back(c.offsets_.back() + index_sets[i].size());
  }
  c.slots_.resize(n_global);
  for (AgentId i = 0; i < index_sets.size(); ++i) {
    for (std::size_t p = 0; p < index_sets[i].size(); ++p) {
      const VarId j = index_sets[i][p];
      c.sharers_[j].push_back(i);
      c.slots_[j].push_back(c.offsets_[i] + p);
    }
  }
  for (VarId j = 0; j < n_global; ++j) {
    if (c.sharers_[j].empty()) {
      throw Error(ErrorCode::UnownedVariable, "variable " + std::to_string(j) + " is owned by no agent");
    }
  }

  c.neighbors_.resize(index_sets.size());
  for (AgentId i = 0; i < index_sets.size(); ++i) {
    auto& ne = c.neighbors_[i];
    for (VarId j : index_sets[i]) {
      for (AgentId k : c.sharers_[j]) {
        if (k != i) ne.push_back(k);
      }
    }
    std::sort(ne.begin(), ne.end());
    ne.erase(std::unique(ne.begin(), ne.end()), ne.end());
  }
  c.index_sets_ = std::move(index_sets);
  return c;
}

std::size_t CouplingStructure::local_index(AgentId i, VarId j) const {
  const auto& set = index_sets_[i];
  auto it = std::lower_bound(set.begin(), set.end(), j);
  if (it == set.end() || *it != j) return npos;
  return static_cast<std::size_t>(it - set.begin());
}

ProductVector::ProductVector(const CouplingStructure& c, double fill)
    : values_(c.total_size(), fill), offsets_(c.offsets().begin(), c.offsets().end()) {}

ProductVector::ProductVector(const CouplingStructure& c, const std::vector<std::vector<double>>& blocks)
    : ProductVector(c) {
  if (blocks.size() != c.n_agents()) {
    throw Error(ErrorCode::LengthMismatch, "expected " + std::to_string(c.n_agents()) + " blocks");
  }
  for (AgentId i = 0; i < blocks.size(); ++i) {
    if (blocks[i].size() != c.block_size(i)) {
      throw Error(ErrorCode::LengthMismatch, "block " + std::to_string(i) + " has wrong length");
    }
    std::copy(blocks[i].begin(), blocks[i].end(), block(i).begin());
  }
}

bool ProductVector::conforms_to(const CouplingStructure& c) const {
  return std::equal(offsets_.begin(), offsets_.end(), c.offsets().begin(), c.offsets().end());
}

namespace {

void require_conforming(const ProductVector& s, const CouplingStructure& c) {
  if (!s.conforms_to(c)) {
    throw Error(ErrorCode::LengthMismatch, "product vector does not match the coupling layout");
  }
}

}  // namespace

ProductVector scatter(const GlobalVector& v, const CouplingStructure& c) {
  if (v.size() != c.n_global()) {
    throw Error(ErrorCode::LengthMismatch, "global vector has length " + std::to_string(v.size()) +
                                               ", expected " + std::to_string(c.n_global()));
  }
  ProductVector s(c);
  auto out = s.values();
  for (VarId j = 0; j < c.n_global(); ++j) {
    for (std::size_t slot : c.slots(j)) out[slot] = v[j];
  }
  return s;
}

GlobalVector gather_average(const ProductVector& s, const CouplingStructure& c) {
  require_conforming(s, c);
  GlobalVector v(c.n_global());
  auto in = s.values();
  for (VarId j = 0; j < c.n_global(); ++j) {
    double sum = 0.0;
    for (std::size_t slot : c.slots(j)) sum += in[slot];
    v[j] = sum / static_cast<double>(c.degree(j));
  }
  return v;
}

ProductVector consensus_project(const ProductVector& s, const CouplingStructure& c) {
  return scatter(gather_average(s, c), c);
}

double consensus_residual(const ProductVector& s, const CouplingStructure& c) {
  const ProductVector p = consensus_project(s, c);
  return distance(s.values(), p.values());
}

double norm(std::span<const double> x) {
  double sq = 0.0;
  for (double e : x) sq += e * e;
  return std::sqrt(sq);
}

double distance(std::span<const double> x, std::span<const double> y) {
  double sq = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - y[k];
    sq += d * d;
  }
  return std::sqrt(sq);
}

}  // namespace cfp
