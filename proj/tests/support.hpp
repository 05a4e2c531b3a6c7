#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cfp/flowprob.hpp"
#include "cfp/graphgen.hpp"
#include "cfp/sets.hpp"
#include "cfp/solvers.hpp"

namespace cfp::testing {

// Two agents sharing one scalar.
inline Problem pair_1d(SetSpec first, SetSpec second, double v0) {
  Problem p;
  p.coupling = CouplingStructure::build({{0}, {0}}, 1);
  p.sets = {std::move(first), std::move(second)};
  p.initial = GlobalVector(std::vector<double>{v0});
  return p;
}

// C1 = {x <= 2}, C2 = [1, 5].
inline Problem pair_feasible(double v0 = 10.0) {
  return pair_1d(SetSpec::halfspace({1.0}, 2.0), SetSpec::box({1.0}, {5.0}), v0);
}

// C1 = {x <= 0}, C2 = {x >= 1}.
inline Problem pair_infeasible(double v0 = 10.0) {
  return pair_1d(SetSpec::halfspace({1.0}, 0.0), SetSpec::halfspace({-1.0}, -1.0), v0);
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> x(n);
  for (double& e : x) e = d(rng);
  return x;
}

struct FlowCase {
  SignedAdjacency graph;
  FlowInstance instance;
  bool infeasible = false;
};

// Calibrated instance on a generated graph.
inline FlowCase flow_case(std::size_t nodes, std::uint64_t seed, bool infeasible, double density = 0.3) {
  GraphGenOptions go;
  go.edge_probability = density;
  FlowCase fc;
  fc.graph = generate_graph(nodes, seed, go);
  const auto [u, o] = pick_source_sink(fc.graph);
  fc.instance = infeasible ? calibrate_relay_infeasible(fc.graph, u, o).instance
                           : calibrate_feasible(fc.graph, u, o).instance;
  fc.infeasible = infeasible;
  return fc;
}

}  // namespace cfp::testing
