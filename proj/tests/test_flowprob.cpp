#include <cmath>

#include "cfp/error.hpp"
#include "cfp/flowprob.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cfp;

namespace {

// u = 0 -> m = 1 -> o = 2.
FlowInstance path(double n_m, double injection = 5.0) {
  FlowInstance f;
  f.nodes = 3;
  f.edges = {{0, 1, 10.0}, {1, 2, 10.0}};
  f.nodal_capacity = {10.0, n_m, 10.0};
  f.source = 0;
  f.sink = 2;
  f.injection = injection;
  return f;
}

SignedAdjacency from_edges(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  SignedAdjacency a(n);
  for (const auto& [i, j] : edges) a.set_edge(i, j, 1);
  return a;
}

}  // namespace

TEST_CASE("interior node set") {
  // Node 1 receives on edge (0,1) and sends on edge (1,2).
  const SetSpec s = node_set(path(5.0), 1);
  REQUIRE(s.dimension() == 2);
  const auto& members = std::get<Composite>(s.variant()).members;
  REQUIRE(members.size() == 3);
  const auto& h = std::get<Hyperplane>(members[0].variant());
  CHECK(h.normal == std::vector<double>{1, -1});
  CHECK(h.offset == 0.0);
  const auto& cap = std::get<Halfspace>(members[1].variant());
  CHECK(cap.normal == std::vector<double>{0, 1});
  CHECK(cap.offset == 5.0);
  const auto& box = std::get<Box>(members[2].variant());
  CHECK(box.upper == std::vector<double>{10, 10});
  CHECK(contains(s, std::vector<double>{4, 4}));
  CHECK_FALSE(contains(s, std::vector<double>{6, 6}));
  CHECK_FALSE(contains(s, std::vector<double>{3, 4}));
}

TEST_CASE("source and sink node sets carry the injection") {
  const FlowInstance f = path(10.0);
  const SetSpec u = node_set(f, 0);
  CHECK(contains(u, std::vector<double>{5}));
  CHECK_FALSE(contains(u, std::vector<double>{4}));
  const SetSpec o = node_set(f, 2);
  CHECK(contains(o, std::vector<double>{5}));
  CHECK_FALSE(contains(o, std::vector<double>{6}));
  CHECK_THROWS_AS(node_set(f, 3), Error);
}

TEST_CASE("build_cfp gives one variable per edge shared by its endpoints") {
  const FlowCfp cfp = build_cfp(path(10.0));
  const auto& c = cfp.problem.coupling;
  CHECK(c.n_agents() == 3);
  CHECK(c.n_global() == 2);
  CHECK(std::vector<VarId>(c.vars(0).begin(), c.vars(0).end()) == std::vector<VarId>{0});
  CHECK(std::vector<VarId>(c.vars(1).begin(), c.vars(1).end()) == std::vector<VarId>{0, 1});
  CHECK(std::vector<VarId>(c.vars(2).begin(), c.vars(2).end()) == std::vector<VarId>{1});
  CHECK(c.degree(0) == 2);
  CHECK(c.degree(1) == 2);

  FlowInstance tri;
  tri.nodes = 3;
  tri.edges = {{2, 0, 1.0}, {0, 1, 1.0}, {1, 2, 1.0}};
  tri.nodal_capacity = {1, 1, 1};
  tri.source = 0;
  tri.sink = 1;
  tri.injection = 0.5;
  const FlowCfp t = build_cfp(tri);
  CHECK(t.problem.coupling.n_global() == 3);
  for (VarId j = 0; j < 3; ++j) CHECK(t.problem.coupling.degree(j) == 2);
}

TEST_CASE("agent blocks are ordered by neighbour id") {
  const auto fc = cfp::testing::flow_case(15, 3, false);
  const FlowCfp cfp = build_cfp(fc.instance);
  const auto& c = cfp.problem.coupling;
  for (AgentId i = 0; i < c.n_agents(); ++i) {
    const auto vars = c.vars(i);
    std::size_t prev = 0;
    for (std::size_t p = 0; p < vars.size(); ++p) {
      const FlowEdge& e = fc.instance.edges[cfp.edge_of_var[vars[p]]];
      const std::size_t nb = e.from == i ? e.to : e.from;
      if (p > 0) CHECK(nb > prev);
      prev = nb;
    }
    CHECK(vars.size() == fc.instance.adjacent(i).size());
  }
}

TEST_CASE("variable counts at sixty nodes are comparable to the reference range") {
  // 936..1146 local plus global variables on 60-node graphs; each edge gives
  // one global and two local variables. Density 0.2 matches that range.
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    GraphGenOptions o;
    o.edge_probability = 0.2;
    const std::size_t edges = generate_graph(60, seed, o).edges().size();
    CAPTURE(seed);
    CHECK(3 * edges >= 800);
    CHECK(3 * edges <= 1300);
  }
}

TEST_CASE("max-flow oracle on the path") {
  const MaxFlowVerdict ok = maxflow_feasible(path(10.0));
  CHECK(ok.feasible);
  CHECK(ok.throughput == 10.0);
  const MaxFlowVerdict tight = maxflow_feasible(path(2.0));
  CHECK_FALSE(tight.feasible);
  CHECK(tight.throughput == 2.0);
  FlowInstance zero = path(10.0, 0.0);
  CHECK_THROWS_AS(maxflow_feasible(zero), Error);
  // Sink capacity below the injection is infeasible whatever the network carries.
  FlowInstance sink_cap = path(10.0, 5.0);
  sink_cap.nodal_capacity[2] = 4.0;
  CHECK_FALSE(maxflow_feasible(sink_cap).feasible);
}

TEST_CASE("constraint violation measure") {
  const FlowInstance f = path(10.0);
  CHECK(max_constraint_violation(f, {5, 5}) == 0.0);
  CHECK(max_constraint_violation(f, {5, 4}) == 1.0);
  CHECK(max_constraint_violation(f, {12, 12}) == 7.0);  // conservation at u: 12 - 5
}

TEST_CASE("empty node sets are detected") {
  FlowInstance f = path(10.0, 20.0);
  CHECK(empty_node_sets(f) == std::vector<std::size_t>{0, 2});
  CHECK_THROWS_AS(build_cfp(f), Error);
  CHECK(empty_node_sets(path(10.0)).empty());
}

TEST_CASE("feasible calibration follows the halving/doubling loop") {
  // Ring 0 -> 1 -> 2 -> 3 -> 0 with u = 0, o = 2: every node has one out-edge.
  const auto ring = from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  const Calibration cal = calibrate_feasible(ring, 0, 2);
  double u = 100, c = 10;
  for (std::size_t s = 0; s < cal.trace.size(); ++s) {
    CHECK(cal.trace[s].injection == u);
    CHECK(cal.trace[s].c_bar == c);
    const auto inst = instance_from_graph(ring, 0, 2, u, c);
    CHECK(cal.trace[s].feasible == maxflow_feasible(inst).feasible);
    CHECK(cal.trace[s].feasible == (s + 1 == cal.trace.size()));
    (s % 2 == 0 ? u : c) = s % 2 == 0 ? u / 2 : c * 2;
  }
  CHECK(cal.trace.back().injection == 12.5);
  CHECK(cal.trace.back().c_bar == 40.0);
  CHECK(maxflow_feasible(cal.instance).feasible);
}

TEST_CASE("feasible calibration keeps already feasible parameters") {
  // u = 0 fans out to 20 relays, each forwards to o = 21, which fans out again.
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t k = 1; k <= 20; ++k) {
    e.emplace_back(0, k);
    e.emplace_back(k, 21);
    e.emplace_back(21, 21 + k);
  }
  const auto fan = from_edges(42, e);
  const Calibration cal = calibrate_feasible(fan, 0, 21);
  CHECK(cal.trace.size() == 1);
  CHECK(cal.instance.injection == 100.0);

  const Calibration inf = calibrate_infeasible(fan, 0, 21);
  CHECK(inf.trace.size() == 2);
  CHECK(inf.instance.injection == 200.0);
  CHECK_FALSE(maxflow_feasible(inf.instance).feasible);
}

TEST_CASE("infeasible calibration keeps already infeasible parameters") {
  const auto ring = from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  const Calibration cal = calibrate_infeasible(ring, 0, 2);
  CHECK(cal.trace.size() == 1);
  CHECK(cal.instance.injection == 100.0);
  CHECK(cal.instance.edges[0].capacity == 10.0);

  const auto single = from_edges(2, {{0, 1}});
  const Calibration one = calibrate_infeasible(single, 0, 1);
  CHECK(one.instance.injection > one.instance.edges[0].capacity);
}

TEST_CASE("calibration without a route diverges") {
  const auto cut = from_edges(3, {{1, 0}, {1, 2}});
  try {
    calibrate_feasible(cut, 0, 2);
    FAIL("expected CalibrationDiverged");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CalibrationDiverged);
  }
}

TEST_CASE("relay-infeasible calibration keeps node sets nonempty") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GraphGenOptions o;
    o.edge_probability = 0.3;
    const auto g = generate_graph(15, seed, o);
    const auto [u, s] = pick_source_sink(g);
    const Calibration cal = calibrate_relay_infeasible(g, u, s);
    CHECK_FALSE(maxflow_feasible(cal.instance).feasible);
    CHECK(empty_node_sets(cal.instance).empty());
    CHECK_NOTHROW(build_cfp(cal.instance));
  }
}
