#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cfp {

using AgentId = std::size_t;
using VarId = std::size_t;

// Variable-sharing structure of a decomposed feasibility problem.
//
// Agent i owns the ordered (ascending) index set J_i of global variables;
// variable j is shared by the agents I_j = {i : j in J_i}; agents are
// neighbours when their index sets intersect. All indices are 0-based.
// Immutable after construction.
class CouplingStructure {
 public:
  CouplingStructure() = default;

  // Throws UnownedVariable, IndexOutOfRange or DuplicateIndex.
  static CouplingStructure build(std::vector<std::vector<VarId>> index_sets,
                                 std::size_t n_global);

  std::size_t n_global() const { return sharers_.size(); }
  std::size_t n_agents() const { return index_sets_.size(); }

  std::span<const VarId> vars(AgentId i) const { return index_sets_[i]; }
  std::span<const AgentId> sharers(VarId j) const { return sharers_[j]; }
  std::span<const AgentId> neighbors(AgentId i) const { return neighbors_[i]; }
  std::size_t degree(VarId j) const { return sharers_[j].size(); }

  // Flat layout of a ProductVector: block i occupies [offset(i), offset(i+1)).
  std::size_t offset(AgentId i) const { return offsets_[i]; }
  std::size_t block_size(AgentId i) const { return index_sets_[i].size(); }
  std::size_t total_size() const { return offsets_.back(); }
  std::span<const std::size_t> offsets() const { return offsets_; }

  // Flat positions of every copy of variable j, ordered like sharers(j).
  std::span<const std::size_t> slots(VarId j) const { return slots_[j]; }

  // Position of variable j inside block i, or npos when j is not in J_i.
  std::size_t local_index(AgentId i, VarId j) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::vector<std::vector<VarId>> index_sets_;
  std::vector<std::vector<AgentId>> sharers_;
  std::vector<std::vector<AgentId>> neighbors_;
  std::vector<std::vector<std::size_t>> slots_;
  std::vector<std::size_t> offsets_{0};
};

class GlobalVector {
 public:
  GlobalVector() = default;
  explicit GlobalVector(std::size_t n, double fill = 0.0) : v_(n, fill) {}
  explicit GlobalVector(std::vector<double> v) : v_(std::move(v)) {}

  std::size_t size() const { return v_.size(); }
  double& operator[](std::size_t j) { return v_[j]; }
  double operator[](std::size_t j) const { return v_[j]; }
  std::span<double> values() { return v_; }
  std::span<const double> values() const { return v_; }
  const std::vector<double>& vec() const { return v_; }

  friend bool operator==(const GlobalVector&, const GlobalVector&) = default;

 private:
  std::vector<double> v_;
};

// Stacked local blocks (s^1, ..., s^N), stored contiguously.
class ProductVector {
 public:
  ProductVector() = default;
  explicit ProductVector(const CouplingStructure& c, double fill = 0.0);
  // Throws LengthMismatch unless block sizes match the coupling.
  ProductVector(const CouplingStructure& c, const std::vector<std::vector<double>>& blocks);

  std::size_t n_blocks() const { return offsets_.size() - 1; }
  std::size_t size() const { return values_.size(); }

  std::span<double> block(AgentId i) {
    return {values_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::span<const double> block(AgentId i) const {
    return {values_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  // True when the block layout equals the coupling's.
  bool conforms_to(const CouplingStructure& c) const;

  friend bool operator==(const ProductVector&, const ProductVector&) = default;

 private:
  std::vector<double> values_;
  std::vector<std::size_t> offsets_{0};
};

// s^i = v restricted to J_i.
ProductVector scatter(const GlobalVector& v, const CouplingStructure& c);

// v_j = mean over q in I_j of agent q's copy of variable j.
GlobalVector gather_average(const ProductVector& s, const CouplingStructure& c);

// Euclidean projection onto the consensus subspace D = range(E-bar).
ProductVector consensus_project(const ProductVector& s, const CouplingStructure& c);

// ||S - P_D(S)||.
double consensus_residual(const ProductVector& s, const CouplingStructure& c);

double norm(std::span<const double> x);
double distance(std::span<const double> x, std::span<const double> y);

}  // namespace cfp
