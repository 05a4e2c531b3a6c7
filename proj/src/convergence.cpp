#include "cfp/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cfp/error.hpp"

namespace cfp {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Continue: return "Continue";
    case Verdict::Feasible: return "Feasible";
    case Verdict::InfeasibleConverged: return "InfeasibleConverged";
  }
  return "Unknown";
}

double guarded_ratio(double num, double den) {
  if (den <= kDenominatorGuard) return num <= kDenominatorGuard ? 0.0 : kInf;
  return num / den;
}

double error_bound_T(const GlobalVector& v, std::span<const SetSpec> sets, const CouplingStructure& c) {
  if (v.size() != c.n_global() || sets.size() != c.n_agents()) {
    throw Error(ErrorCode::LengthMismatch, "error bound inputs do not match the coupling");
  }
  const ProductVector s = scatter(v, c);
  double t = 0.0;
  for (AgentId i = 0; i < c.n_agents(); ++i) t = std::max(t, dist(sets[i], s.block(i)));
  return t;
}

double r1_from_distances(double d_prev, double d_curr) {
  const double prev_sq = d_prev * d_prev;
  return guarded_ratio(std::abs(d_curr * d_curr - prev_sq), prev_sq);
}

double local_rc_r1(std::span<const double> s_prev, std::span<const double> s_curr, const SetSpec& set) {
  return r1_from_distances(dist(set, s_prev), dist(set, s_curr));
}

double r2_from_distances(double set_prev, double set_curr, double cons_prev, double cons_curr) {
  const double sp = set_prev * set_prev;
  const double cp = cons_prev * cons_prev;
  const double num = std::abs(set_curr * set_curr - sp) + std::abs(cons_curr * cons_curr - cp);
  return guarded_ratio(num, sp + cp);
}

double local_rc_r2(std::span<const double> y_prev, std::span<const double> y_curr, const SetSpec& set,
                   std::span<const double> consensus_prev, std::span<const double> consensus_curr) {
  return r2_from_distances(dist(set, y_prev), dist(set, y_curr), distance(y_prev, consensus_prev),
                           distance(y_curr, consensus_curr));
}

bool local_feasibility(std::span<const double> iterate, const SetSpec& set, double tol) {
  return contains(set, iterate, tol);
}

bool consensus_check(const ProductVector& y, const CouplingStructure& c, double tol) {
  return consensus_residual(y, c) <= tol;
}

Verdict detect(std::span<const AgentStatus> statuses, bool needs_consensus_check, bool consensus_ok,
               double rc_threshold, double objective_floor) {
  if (statuses.empty()) throw Error(ErrorCode::EmptyStatusList, "detector needs one status per agent");
  const bool all_feasible =
      std::all_of(statuses.begin(), statuses.end(), [](const AgentStatus& s) { return s.locally_feasible; });
  if (all_feasible && (consensus_ok || !needs_consensus_check)) return Verdict::Feasible;

  const bool all_settled = std::all_of(statuses.begin(), statuses.end(),
                                       [&](const AgentStatus& s) { return s.rc < rc_threshold; });
  double max_objective = 0.0;
  for (const auto& s : statuses) max_objective = std::max(max_objective, s.local_objective);
  if (all_settled && max_objective > objective_floor) return Verdict::InfeasibleConverged;
  return Verdict::Continue;
}

}  // namespace cfp
