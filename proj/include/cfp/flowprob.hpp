#pragma once

#include <cstddef>
#include <vector>

#include "cfp/coupling.hpp"
#include "cfp/graphgen.hpp"
#include "cfp/sets.hpp"
#include "cfp/solvers.hpp"

namespace cfp {

struct FlowEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  double capacity = 0.0;

  friend bool operator==(const FlowEdge&, const FlowEdge&) = default;
};

// Single-commodity flow feasibility: route `injection` from source to sink
// under edge capacities, nodal (outgoing) capacities and conservation.
struct FlowInstance {
  std::size_t nodes = 0;
  std::vector<FlowEdge> edges;
  std::vector<double> nodal_capacity;
  std::size_t source = 0;
  std::size_t sink = 0;
  double injection = 0.0;

  // Throws InvalidInstance: bad endpoints, self loops, parallel edges,
  // negative capacities, source == sink, injection <= 0.
  void validate() const;

  std::vector<std::size_t> out_neighbors(std::size_t i) const;
  std::vector<std::size_t> adjacent(std::size_t i) const;  // sorted

  friend bool operator==(const FlowInstance&, const FlowInstance&) = default;
};

// Constraint set of node i over its incident edge flows, ordered by neighbor
// id: conservation hyperplane, outgoing-capacity halfspace, and edge box.
// Throws InvalidNode, or InvalidInstance when the node's constraints are
// contradictory without involving any flow (e.g. sink with injection above n_o
// and no outgoing edge).
SetSpec node_set(const FlowInstance& inst, std::size_t i);

// The decomposed problem: one agent per node, one variable per edge. Throws
// InvalidInstance when some node set is empty.
// Variable ids follow (min endpoint, max endpoint) order, which makes every
// agent's block ordered by neighbor id.
struct FlowCfp {
  Problem problem;
  std::vector<std::size_t> edge_of_var;  // variable id -> index into inst.edges
};

FlowCfp build_cfp(const FlowInstance& inst);

// Nodes whose own constraint set is empty (only the source and sink can be).
std::vector<std::size_t> empty_node_sets(const FlowInstance& inst);

// Flow on each edge (indexed like inst.edges) read from a consensus vector.
std::vector<double> edge_flows(const FlowCfp& cfp, const GlobalVector& v);

// Largest violation of any constraint by the given edge flows.
double max_constraint_violation(const FlowInstance& inst, const std::vector<double>& flows);

struct MaxFlowVerdict {
  bool feasible = false;
  double throughput = 0.0;
};

// Exact check by max-flow on the node-split network.
MaxFlowVerdict maxflow_feasible(const FlowInstance& inst);

// Instance with uniform edge capacity c_bar and n_i = |O(i)| c_bar / 2.
FlowInstance instance_from_graph(const SignedAdjacency& a, std::size_t source, std::size_t sink,
                                 double injection, double c_bar);

struct CalibrationStep {
  double injection = 0.0;
  double c_bar = 0.0;
  bool feasible = false;
  double throughput = 0.0;

  friend bool operator==(const CalibrationStep&, const CalibrationStep&) = default;
};

struct Calibration {
  FlowInstance instance;
  std::vector<CalibrationStep> trace;
};

inline constexpr std::size_t kDefaultCalibrationRounds = 64;

// Start from U = 100, c_bar = 10; alternately halve U and double c_bar until
// the oracle says feasible. Throws CalibrationDiverged.
Calibration calibrate_feasible(const SignedAdjacency& a, std::size_t source, std::size_t sink,
                               std::size_t max_rounds = kDefaultCalibrationRounds);
// Same loop with U doubled and c_bar halved, until infeasible. On generated
// graphs the result almost always has an empty source or sink set, so the
// decomposed problem is not well posed; see calibrate_relay_infeasible.
Calibration calibrate_infeasible(const SignedAdjacency& a, std::size_t source, std::size_t sink,
                                 std::size_t max_rounds = kDefaultCalibrationRounds);

// Infeasible instance whose node sets are all nonempty. Starts from the
// calibrate_feasible result, keeps U, n_u, n_o and the capacities of edges
// touching exactly one of u and o, and halves c_bar on the remaining edges and nodal
// capacities until the oracle reports infeasible. Trace entries record the
// relay c_bar. Throws CalibrationDiverged.
Calibration calibrate_relay_infeasible(const SignedAdjacency& a, std::size_t source, std::size_t sink,
                                       std::size_t max_rounds = kDefaultCalibrationRounds);

}  // namespace cfp
