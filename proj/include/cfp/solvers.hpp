#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cfp/channel.hpp"
#include "cfp/convergence.hpp"
#include "cfp/coupling.hpp"
#include "cfp/sets.hpp"

namespace cfp {

// A decomposed feasibility problem: agent i must keep its block inside sets[i]
// (dimension |J_i|), and all copies of a shared variable must agree.
struct Problem {
  CouplingStructure coupling;
  std::vector<SetSpec> sets;
  GlobalVector initial;  // starting point v^(1); zeros when empty

  // Throws LengthMismatch / DimensionMismatch.
  void validate() const;
  GlobalVector start() const;
};

enum class Algorithm {
  FB,       // forward-backward on F1
  AFB,      // accelerated forward-backward on F1
  DR,       // Douglas-Rachford on F2
  ALM,      // alternating linearization on F2
  FALM,     // fast alternating linearization on F2
  VN,       // von Neumann alternating projections
  Dykstra,  // Dykstra alternating projections
  MPA,      // mean projection (global communication)
};

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::FB,   Algorithm::AFB, Algorithm::DR,
                                               Algorithm::ALM,  Algorithm::FALM, Algorithm::VN,
                                               Algorithm::Dykstra, Algorithm::MPA};

std::string_view to_string(Algorithm a);
// Accepts fb|afb|dr|alm|falm|vn|dykstra|mpa.
std::optional<Algorithm> parse_algorithm(std::string_view name);

struct SolverConfig {
  Algorithm algorithm = Algorithm::AFB;
  // Per-iteration schedules; the last entry repeats. FB: gamma in [eps, 2-eps],
  // lambda in [eps, 1]. DR: constant gamma > 0, lambda in [eps, 2-eps].
  std::vector<double> gamma{1.0};
  std::vector<double> lambda{1.0};
  double theta0 = 1.0;  // AFB, in (0, 1]
  double mu1 = 1.0;     // ALM/FALM
  double mu2 = 1.0;
  double epsilon_guard = 1e-2;
  std::size_t max_iter = 10'000;
  double rc_threshold = kDefaultRcThreshold;
  double feas_tol = 1e-6;
  double objective_floor = kDefaultObjectiveFloor;
  std::vector<double> alpha_weights;  // MPA; empty means uniform 1/N
  // When false the detector still runs and is traced, but never stops the run.
  bool early_stop = true;
  // Keep every monitored iterate in the report (memory heavy; for analysis).
  bool record_iterates = false;
};

struct IterationTrace {
  std::size_t k = 0;
  double objective = 0.0;  // F1, F2, or 0.5 ||V - P_C(V)||^2 for VN/Dykstra
  double T_v = 0.0;        // error bound at the averaged iterate
  std::vector<double> per_agent_rc;
  double max_rc = 0.0;
  std::size_t messages = 0;           // algorithm messages this iteration
  std::size_t detector_messages = 0;  // extra detector exchange this iteration
  double displacement = 0.0;          // ||V - S|| (VN/Dykstra only)
  Verdict verdict = Verdict::Continue;
};

enum class SolveStatus { Feasible, Infeasible, MaxIter };
const char* to_string(SolveStatus s);

struct SolveReport {
  Algorithm algorithm = Algorithm::AFB;
  SolveStatus status = SolveStatus::MaxIter;
  std::size_t iterations = 0;
  GlobalVector final_v;    // average of the monitored iterate
  ProductVector final_S;   // the monitored iterate
  std::vector<IterationTrace> trace;
  std::size_t total_messages = 0;
  std::size_t total_detector_messages = 0;
  std::vector<ProductVector> iterates;  // only with record_iterates
};

// F1(S) = 0.5 sum_i dist(s^i, C_i)^2 (the indicator of D is not evaluated).
double objective_f1(const ProductVector& s, const Problem& p);
// F2(S) = 0.5 sum_i dist(s^i, C_i)^2 + 0.5 ||S - P_D(S)||^2.
double objective_f2(const ProductVector& s, const Problem& p);

// theta' in (0, 1] solving (1 - theta') / theta'^2 = 1 / theta^2. Throws OutOfRange.
double theta_next(double theta);
// (1 + sqrt(1 + t^2)) / 2 for t >= 1. Throws OutOfRange.
double t_next(double t);

// Runs config.algorithm. Throws InvalidSchedule, InvalidWeights, NumericFailure
// and propagates projection errors.
SolveReport solve(const Problem& problem, const SolverConfig& config);
SolveReport solve(const Problem& problem, const SolverConfig& config, ConsensusChannel& channel);

SolveReport solve_fb(const Problem& problem, SolverConfig config);
SolveReport solve_afb(const Problem& problem, SolverConfig config);
SolveReport solve_dr(const Problem& problem, SolverConfig config);
SolveReport solve_alm(const Problem& problem, SolverConfig config);
SolveReport solve_falm(const Problem& problem, SolverConfig config);
SolveReport solve_vn(const Problem& problem, SolverConfig config);
SolveReport solve_dykstra(const Problem& problem, SolverConfig config);
SolveReport solve_mpa(const Problem& problem, SolverConfig config);

}  // namespace cfp
