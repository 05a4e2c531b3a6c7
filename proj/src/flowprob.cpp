#include "cfp/flowprob.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <string>
#include <utility>

#include "cfp/error.hpp"

namespace cfp {

void FlowInstance::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidInstance, what); };
  if (nodes == 0) fail("instance has no nodes");
  if (nodal_capacity.size() != nodes) fail("nodal capacity count differs from node count");
  if (source >= nodes || sink >= nodes) fail("source or sink out of range");
  if (source == sink) fail("source and sink coincide");
  if (!(injection > 0.0) || !std::isfinite(injection)) fail("injection must be positive and finite");
  for (double n : nodal_capacity) {
    if (!(n >= 0.0) || !std::isfinite(n)) fail("nodal capacities must be nonnegative and finite");
  }
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const FlowEdge& e : edges) {
    if (e.from >= nodes || e.to >= nodes) fail("edge endpoint out of range");
    if (e.from == e.to) fail("self loop at node " + std::to_string(e.from));
    if (!(e.capacity >= 0.0) || !std::isfinite(e.capacity)) fail("edge capacities must be nonnegative and finite");
    if (!seen.emplace(std::min(e.from, e.to), std::max(e.from, e.to)).second) {
      fail("more than one edge between nodes " + std::to_string(e.from) + " and " + std::to_string(e.to));
    }
  }
}

std::vector<std::size_t> FlowInstance::out_neighbors(std::size_t i) const {
  std::vector<std::size_t> out;
  for (const FlowEdge& e : edges) {
    if (e.from == i) out.push_back(e.to);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> FlowInstance::adjacent(std::size_t i) const {
  std::vector<std::size_t> out;
  for (const FlowEdge& e : edges) {
    if (e.from == i) out.push_back(e.to);
    if (e.to == i) out.push_back(e.from);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

// Edges incident to i, ordered by neighbor id, with +1 for incoming and -1
// for outgoing (the conservation row "in - out").
struct Incidence {
  std::vector<std::size_t> edge;
  std::vector<double> sign;
};

Incidence incidence(const FlowInstance& inst, std::size_t i) {
  std::vector<std::pair<std::size_t, std::size_t>> nb;  // (neighbor, edge index)
  for (std::size_t e = 0; e < inst.edges.size(); ++e) {
    if (inst.edges[e].from == i) nb.emplace_back(inst.edges[e].to, e);
    if (inst.edges[e].to == i) nb.emplace_back(inst.edges[e].from, e);
  }
  std::sort(nb.begin(), nb.end());
  Incidence out;
  for (const auto& [neighbor, e] : nb) {
    out.edge.push_back(e);
    out.sign.push_back(inst.edges[e].to == i ? 1.0 : -1.0);
  }
  return out;
}

// Right-hand sides of "in - out = b" and "out <= n".
std::pair<double, double> node_offsets(const FlowInstance& inst, std::size_t i) {
  double b = 0.0;
  double n = inst.nodal_capacity[i];
  if (i == inst.source) b = -inst.injection;
  if (i == inst.sink) {
    b = inst.injection;
    n -= inst.injection;
  }
  return {b, n};
}

}  // namespace

SetSpec node_set(const FlowInstance& inst, std::size_t i) {
  if (i >= inst.nodes) throw Error(ErrorCode::InvalidNode, "node " + std::to_string(i) + " out of range");
  const Incidence inc = incidence(inst, i);
  const auto [b, n] = node_offsets(inst, i);
  const std::size_t dim = inc.edge.size();
  if (dim == 0) {
    throw Error(ErrorCode::InvalidInstance, "node " + std::to_string(i) + " has no incident edges");
  }

  std::vector<double> out_row(dim, 0.0);
  std::vector<double> upper(dim);
  bool has_out = false;
  for (std::size_t p = 0; p < dim; ++p) {
    if (inc.sign[p] < 0) {
      out_row[p] = 1.0;
      has_out = true;
    }
    upper[p] = inst.edges[inc.edge[p]].capacity;
  }

  std::vector<SetSpec> members;
  members.push_back(SetSpec::hyperplane(inc.sign, b));
  if (has_out) {
    members.push_back(SetSpec::halfspace(std::move(out_row), n));
  } else if (n < 0.0) {
    throw Error(ErrorCode::InvalidInstance,
                "nodal capacity of node " + std::to_string(i) + " is below the injection and it has no outgoing edge");
  }
  members.push_back(SetSpec::box(std::vector<double>(dim, 0.0), std::move(upper)));
  return SetSpec::composite(std::move(members));
}

std::vector<std::size_t> empty_node_sets(const FlowInstance& inst) {
  inst.validate();
  double out_cap = 0.0;
  double in_cap = 0.0;
  for (const FlowEdge& e : inst.edges) {
    if (e.from == inst.source) out_cap += e.capacity;
    if (e.to == inst.sink) in_cap += e.capacity;
  }
  // Zero inflow at u and zero outflow at o are the cheapest choices, so each
  // terminal set is nonempty iff U fits through its own limits.
  const double u = inst.injection;
  std::vector<std::size_t> out;
  if (u > std::min(inst.nodal_capacity[inst.source], out_cap)) out.push_back(inst.source);
  if (u > std::min(inst.nodal_capacity[inst.sink], in_cap)) out.push_back(inst.sink);
  std::sort(out.begin(), out.end());
  return out;
}

FlowCfp build_cfp(const FlowInstance& inst) {
  inst.validate();
  if (const auto empty = empty_node_sets(inst); !empty.empty()) {
    throw Error(ErrorCode::InvalidInstance, "constraint set of node " + std::to_string(empty.front()) +
                                                " is empty on its own (injection exceeds its local limits)");
  }
  FlowCfp out;
  out.edge_of_var.resize(inst.edges.size());
  std::iota(out.edge_of_var.begin(), out.edge_of_var.end(), std::size_t{0});
  auto key = [&](std::size_t e) {
    const FlowEdge& x = inst.edges[e];
    return std::pair{std::min(x.from, x.to), std::max(x.from, x.to)};
  };
  std::sort(out.edge_of_var.begin(), out.edge_of_var.end(),
            [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  std::vector<VarId> var_of_edge(inst.edges.size());
  for (VarId j = 0; j < out.edge_of_var.size(); ++j) var_of_edge[out.edge_of_var[j]] = j;

  std::vector<std::vector<VarId>> index_sets(inst.nodes);
  std::vector<SetSpec> sets;
  sets.reserve(inst.nodes);
  for (std::size_t i = 0; i < inst.nodes; ++i) {
    for (std::size_t e : incidence(inst, i).edge) index_sets[i].push_back(var_of_edge[e]);
    sets.push_back(node_set(inst, i));
  }
  out.problem.coupling = CouplingStructure::build(std::move(index_sets), inst.edges.size());
  out.problem.sets = std::move(sets);
  return out;
}

std::vector<double> edge_flows(const FlowCfp& cfp, const GlobalVector& v) {
  std::vector<double> flows(cfp.edge_of_var.size());
  for (std::size_t j = 0; j < flows.size(); ++j) flows[cfp.edge_of_var[j]] = v[j];
  return flows;
}

double max_constraint_violation(const FlowInstance& inst, const std::vector<double>& flows) {
  double worst = 0.0;
  std::vector<double> in(inst.nodes, 0.0);
  std::vector<double> out(inst.nodes, 0.0);
  for (std::size_t e = 0; e < inst.edges.size(); ++e) {
    const double f = flows[e];
    worst = std::max({worst, -f, f - inst.edges[e].capacity});
    out[inst.edges[e].from] += f;
    in[inst.edges[e].to] += f;
  }
  for (std::size_t i = 0; i < inst.nodes; ++i) {
    const auto [b, n] = node_offsets(inst, i);
    worst = std::max({worst, std::abs(in[i] - out[i] - b), out[i] - n});
  }
  return worst;
}

namespace {

class Dinic {
 public:
  explicit Dinic(std::size_t n) : graph_(n), level_(n), it_(n) {}

  void add_arc(std::size_t a, std::size_t b, double cap) {
    graph_[a].push_back({b, graph_[b].size(), cap});
    graph_[b].push_back({a, graph_[a].size() - 1, 0.0});
  }

  double max_flow(std::size_t s, std::size_t t) {
    double total = 0.0;
    while (bfs(s, t)) {
      std::fill(it_.begin(), it_.end(), std::size_t{0});
      while (true) {
        const double pushed = dfs(s, t, std::numeric_limits<double>::infinity());
        if (pushed <= kEps) break;
        total += pushed;
      }
    }
    return total;
  }

 private:
  struct Arc {
    std::size_t to;
    std::size_t rev;
    double cap;
  };
  static constexpr double kEps = 1e-12;

  bool bfs(std::size_t s, std::size_t t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<std::size_t> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const std::size_t v = q.front();
      q.pop();
      for (const Arc& a : graph_[v]) {
        if (a.cap > kEps && level_[a.to] < 0) {
          level_[a.to] = level_[v] + 1;
          q.push(a.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  double dfs(std::size_t v, std::size_t t, double limit) {
    if (v == t) return limit;
    for (std::size_t& i = it_[v]; i < graph_[v].size(); ++i) {
      Arc& a = graph_[v][i];
      if (a.cap <= kEps || level_[a.to] != level_[v] + 1) continue;
      const double d = dfs(a.to, t, std::min(limit, a.cap));
      if (d > kEps) {
        a.cap -= d;
        graph_[a.to][a.rev].cap += d;
        return d;
      }
    }
    return 0.0;
  }

  std::vector<std::vector<Arc>> graph_;
  std::vector<int> level_;
  std::vector<std::size_t> it_;
};

}  // namespace

MaxFlowVerdict maxflow_feasible(const FlowInstance& inst) {
  inst.validate();
  // Node i becomes in = 2i, out = 2i + 1; the internal arc carries everything
  // the node sends on, so its capacity is the nodal limit.
  Dinic net(2 * inst.nodes);
  for (std::size_t i = 0; i < inst.nodes; ++i) {
    const double cap = node_offsets(inst, i).second;
    net.add_arc(2 * i, 2 * i + 1, std::max(cap, 0.0));
  }
  for (const FlowEdge& e : inst.edges) net.add_arc(2 * e.from + 1, 2 * e.to, e.capacity);
  MaxFlowVerdict v;
  v.throughput = net.max_flow(2 * inst.source, 2 * inst.sink);
  const double slack = 1e-9 * std::max(1.0, inst.injection);
  v.feasible = v.throughput >= inst.injection - slack && inst.injection <= inst.nodal_capacity[inst.sink];
  return v;
}

FlowInstance instance_from_graph(const SignedAdjacency& a, std::size_t source, std::size_t sink,
                                 double injection, double c_bar) {
  FlowInstance inst;
  inst.nodes = a.size();
  for (const auto& [i, j] : a.edges()) inst.edges.push_back({i, j, c_bar});
  inst.nodal_capacity.resize(inst.nodes);
  for (std::size_t i = 0; i < inst.nodes; ++i) {
    inst.nodal_capacity[i] = static_cast<double>(a.out_degree(i)) * c_bar / 2.0;
  }
  inst.source = source;
  inst.sink = sink;
  inst.injection = injection;
  return inst;
}

namespace {

Calibration calibrate(const SignedAdjacency& a, std::size_t source, std::size_t sink, std::size_t max_rounds,
                      bool want_feasible) {
  double u = 100.0;
  double c = 10.0;
  Calibration cal;
  auto check = [&] {
    cal.instance = instance_from_graph(a, source, sink, u, c);
    const MaxFlowVerdict v = maxflow_feasible(cal.instance);
    cal.trace.push_back({u, c, v.feasible, v.throughput});
    return v.feasible == want_feasible;
  };
  if (check()) return cal;
  for (std::size_t round = 0; round < max_rounds; ++round) {
    u = want_feasible ? u / 2.0 : u * 2.0;
    if (check()) return cal;
    c = want_feasible ? c * 2.0 : c / 2.0;
    if (check()) return cal;
  }
  throw Error(ErrorCode::CalibrationDiverged, std::string("no ") + (want_feasible ? "feasible" : "infeasible") +
                                                  " parameters after " + std::to_string(max_rounds) + " rounds");
}

}  // namespace

Calibration calibrate_relay_infeasible(const SignedAdjacency& a, std::size_t source, std::size_t sink,
                                       std::size_t max_rounds) {
  Calibration cal = calibrate_feasible(a, source, sink, max_rounds);
  const FlowInstance base = cal.instance;
  const double c = cal.trace.back().c_bar;
  auto terminal = [&](std::size_t i) { return i == source || i == sink; };
  double relay = c;
  for (std::size_t round = 0; round < max_rounds; ++round) {
    relay /= 2.0;
    FlowInstance inst = base;
    for (FlowEdge& e : inst.edges) {
      if (terminal(e.from) == terminal(e.to)) e.capacity = relay;
    }
    for (std::size_t i = 0; i < inst.nodes; ++i) {
      if (!terminal(i)) inst.nodal_capacity[i] = static_cast<double>(a.out_degree(i)) * relay / 2.0;
    }
    const MaxFlowVerdict v = maxflow_feasible(inst);
    cal.trace.push_back({inst.injection, relay, v.feasible, v.throughput});
    if (!empty_node_sets(inst).empty()) break;
    if (!v.feasible) {
      cal.instance = std::move(inst);
      return cal;
    }
  }
  throw Error(ErrorCode::CalibrationDiverged, "could not make the relay network infeasible with nonempty node sets");
}

Calibration calibrate_feasible(const SignedAdjacency& a, std::size_t source, std::size_t sink,
                               std::size_t max_rounds) {
  return calibrate(a, source, sink, max_rounds, true);
}

Calibration calibrate_infeasible(const SignedAdjacency& a, std::size_t source, std::size_t sink,
                                 std::size_t max_rounds) {
  return calibrate(a, source, sink, max_rounds, false);
}

}  // namespace cfp
