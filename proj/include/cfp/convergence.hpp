#pragma once

#include <span>

#include "cfp/coupling.hpp"
#include "cfp/sets.hpp"

namespace cfp {

inline constexpr double kDefaultRcThreshold = 1e-4;
inline constexpr double kDefaultObjectiveFloor = 1e-8;
// Quantities at or below this are treated as zero in relative-change ratios.
inline constexpr double kDenominatorGuard = 1e-15;

struct AgentStatus {
  bool locally_feasible = false;
  double rc = 0.0;               // local relative change (R1 or R2 bound term)
  double local_objective = 0.0;  // agent's term of the minimized objective
};

enum class Verdict { Continue, Feasible, InfeasibleConverged };

const char* to_string(Verdict v);

// num / den with 0/0 -> 0 and x/0 -> +inf (both judged against kDenominatorGuard).
double guarded_ratio(double num, double den);

// T(v) = max_i dist(v restricted to J_i, C_i).
double error_bound_T(const GlobalVector& v, std::span<const SetSpec> sets, const CouplingStructure& c);

// |d_curr^2 - d_prev^2| / d_prev^2 with d = dist(., set).
double local_rc_r1(std::span<const double> s_prev, std::span<const double> s_curr, const SetSpec& set);
double r1_from_distances(double d_prev, double d_curr);

// Combined set-distance and consensus-deviation change of one agent,
// normalised by the agent's previous total. consensus_prev/curr are the
// agent's restriction of the averaged iterate C^(k-1), C^(k).
double local_rc_r2(std::span<const double> y_prev, std::span<const double> y_curr, const SetSpec& set,
                   std::span<const double> consensus_prev, std::span<const double> consensus_curr);
double r2_from_distances(double set_prev, double set_curr, double cons_prev, double cons_curr);

bool local_feasibility(std::span<const double> iterate, const SetSpec& set, double tol);
bool consensus_check(const ProductVector& y, const CouplingStructure& c, double tol);

// Feasible when every agent is locally feasible (and consensus holds where
// it is checked); InfeasibleConverged when every rc is below the threshold
// while some agent keeps an objective above the floor. Feasible wins ties.
// Throws EmptyStatusList.
Verdict detect(std::span<const AgentStatus> statuses, bool needs_consensus_check, bool consensus_ok,
               double rc_threshold = kDefaultRcThreshold, double objective_floor = kDefaultObjectiveFloor);

}  // namespace cfp
