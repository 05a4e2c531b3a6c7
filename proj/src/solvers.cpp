#include "cfp/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "cfp/error.hpp"

namespace cfp {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::FB: return "fb";
    case Algorithm::AFB: return "afb";
    case Algorithm::DR: return "dr";
    case Algorithm::ALM: return "alm";
    case Algorithm::FALM: return "falm";
    case Algorithm::VN: return "vn";
    case Algorithm::Dykstra: return "dykstra";
    case Algorithm::MPA: return "mpa";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (Algorithm a : kAllAlgorithms) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Feasible: return "Feasible";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::MaxIter: return "MaxIter";
  }
  return "Unknown";
}

void Problem::validate() const {
  if (sets.size() != coupling.n_agents()) {
    throw Error(ErrorCode::LengthMismatch, "problem has " + std::to_string(sets.size()) + " sets for " +
                                               std::to_string(coupling.n_agents()) + " agents");
  }
  for (AgentId i = 0; i < sets.size(); ++i) {
    if (sets[i].dimension() != coupling.block_size(i)) {
      throw Error(ErrorCode::DimensionMismatch, "set of agent " + std::to_string(i) + " has dimension " +
                                                    std::to_string(sets[i].dimension()));
    }
  }
  if (initial.size() != 0 && initial.size() != coupling.n_global()) {
    throw Error(ErrorCode::LengthMismatch, "initial point has wrong length");
  }
}

GlobalVector Problem::start() const {
  return initial.size() == 0 ? GlobalVector(coupling.n_global()) : initial;
}

double theta_next(double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw Error(ErrorCode::OutOfRange, "theta must lie in (0, 1]");
  return (-theta * theta + theta * std::sqrt(theta * theta + 4.0)) / 2.0;
}

double t_next(double t) {
  if (!(t >= 1.0) || !std::isfinite(t)) throw Error(ErrorCode::OutOfRange, "t must be >= 1");
  return (1.0 + std::sqrt(1.0 + t * t)) / 2.0;
}

namespace {

ProductVector project_blocks(const Problem& p, const ProductVector& x) {
  ProductVector out(p.coupling);
  for (AgentId i = 0; i < p.coupling.n_agents(); ++i) project_into(p.sets[i], x.block(i), out.block(i));
  return out;
}

double half_sq_dist_sum(const Problem& p, const ProductVector& x) {
  double f = 0.0;
  for (AgentId i = 0; i < p.coupling.n_agents(); ++i) {
    const double d = dist(p.sets[i], x.block(i));
    f += 0.5 * d * d;
  }
  return f;
}

// out = a * x + b * y, elementwise over the flat storage.
void combine(ProductVector& out, double a, const ProductVector& x, double b, const ProductVector& y) {
  auto o = out.values();
  auto xv = x.values();
  auto yv = y.values();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] = a * xv[k] + b * yv[k];
}

double schedule_at(const std::vector<double>& s, std::size_t k) {
  return s[std::min(k - 1, s.size() - 1)];
}

// Evaluates the local convergence tests after each update and keeps the trace.
class Monitor {
 public:
  // split = true for the F2 family: consensus is not implied by the iterate,
  // so every observation performs one detector exchange.
  Monitor(const Problem& p, const SolverConfig& cfg, ConsensusChannel& ch, bool split)
      : p_(p), cfg_(cfg), ch_(ch), split_(split),
        base_msgs_(ch.messages()), base_det_(ch.detector_messages()) {
    report_.algorithm = cfg.algorithm;
  }

  void prime(const ProductVector& x) { proj_ = project_blocks(p_, x); }

  // P_C of the most recently primed or observed iterate.
  const ProductVector& projection() const { return proj_; }

  // Extra per-agent change folded into the next observation (max with R1).
  void set_extra_rc(const std::vector<double>* extra) { extra_rc_ = extra; }

  Verdict observe(std::size_t k, const ProductVector& x, double displacement) {
    const auto& c = p_.coupling;
    const std::size_t n = c.n_agents();
    proj_ = project_blocks(p_, x);

    std::vector<double> set_d(n), cons_d(n, 0.0);
    for (AgentId i = 0; i < n; ++i) set_d[i] = distance(x.block(i), proj_.block(i));

    bool consensus_ok = true;
    double t_v = 0.0;
    if (split_) {
      const ProductVector avg = ch_.average(x, k, ExchangePurpose::Detector);
      double sq = 0.0;
      for (AgentId i = 0; i < n; ++i) {
        cons_d[i] = distance(x.block(i), avg.block(i));
        sq += cons_d[i] * cons_d[i];
        t_v = std::max(t_v, dist(p_.sets[i], avg.block(i)));
      }
      consensus_ok = std::sqrt(sq) <= cfg_.feas_tol;
    } else {
      for (double d : set_d) t_v = std::max(t_v, d);
    }

    IterationTrace tr;
    tr.k = k;
    tr.T_v = t_v;
    tr.displacement = displacement;
    tr.per_agent_rc.resize(n);
    std::vector<AgentStatus> statuses(n);
    for (AgentId i = 0; i < n; ++i) {
      auto& st = statuses[i];
      st.local_objective = 0.5 * set_d[i] * set_d[i] + 0.5 * cons_d[i] * cons_d[i];
      st.locally_feasible = set_d[i] <= cfg_.feas_tol;
      if (prev_set_.empty()) {
        st.rc = kInf;
      } else if (split_) {
        st.rc = r2_from_distances(prev_set_[i], set_d[i], prev_cons_[i], cons_d[i]);
      } else {
        st.rc = r1_from_distances(prev_set_[i], set_d[i]);
      }
      if (extra_rc_ != nullptr) st.rc = std::max(st.rc, (*extra_rc_)[i]);
      tr.objective += st.local_objective;
      tr.per_agent_rc[i] = st.rc;
      tr.max_rc = std::max(tr.max_rc, st.rc);
    }
    if (!std::isfinite(tr.objective)) {
      throw Error(ErrorCode::NumericFailure, "objective became non-finite at iteration " + std::to_string(k));
    }
    tr.verdict = detect(statuses, split_, consensus_ok, cfg_.rc_threshold, cfg_.objective_floor);

    tr.messages = ch_.messages() - base_msgs_;
    tr.detector_messages = ch_.detector_messages() - base_det_;
    base_msgs_ = ch_.messages();
    base_det_ = ch_.detector_messages();

    prev_set_ = std::move(set_d);
    prev_cons_ = std::move(cons_d);
    report_.trace.push_back(std::move(tr));
    report_.iterations = k;
    last_ = x;
    if (cfg_.record_iterates) report_.iterates.push_back(x);
    return report_.trace.back().verdict;
  }

  SolveReport finish() {
    const Verdict v = report_.trace.empty() ? Verdict::Continue : report_.trace.back().verdict;
    report_.status = v == Verdict::Feasible              ? SolveStatus::Feasible
                     : v == Verdict::InfeasibleConverged ? SolveStatus::Infeasible
                                                         : SolveStatus::MaxIter;
    report_.final_S = report_.trace.empty() ? scatter(p_.start(), p_.coupling) : last_;
    report_.final_v = gather_average(report_.final_S, p_.coupling);
    for (const auto& tr : report_.trace) {
      report_.total_messages += tr.messages;
      report_.total_detector_messages += tr.detector_messages;
    }
    return std::move(report_);
  }

 private:
  const Problem& p_;
  const SolverConfig& cfg_;
  ConsensusChannel& ch_;
  bool split_;
  std::size_t base_msgs_;
  std::size_t base_det_;
  ProductVector proj_;
  ProductVector last_;
  const std::vector<double>* extra_rc_ = nullptr;
  std::vector<double> prev_set_;
  std::vector<double> prev_cons_;
  SolveReport report_;
};

// Runs step(k) -> (monitored iterate, displacement) until the detector fires.
template <class Step>
SolveReport drive(const SolverConfig& cfg, Monitor& mon, Step&& step) {
  for (std::size_t k = 1; k <= cfg.max_iter; ++k) {
    auto [x, displacement] = step(k);
    const Verdict v = mon.observe(k, *x, displacement);
    if (cfg.early_stop && v != Verdict::Continue) break;
  }
  return mon.finish();
}

void validate_config(const Problem& p, const SolverConfig& cfg) {
  const double eps = cfg.epsilon_guard;
  if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::InvalidSchedule, "epsilon_guard must lie in (0, 1)");
  if (!(cfg.rc_threshold >= 0.0) || !(cfg.feas_tol >= 0.0) || !(cfg.objective_floor >= 0.0)) {
    throw Error(ErrorCode::InvalidSchedule, "thresholds must be nonnegative");
  }
  auto in_range = [](const std::vector<double>& s, double lo, double hi) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [&](double x) { return x >= lo && x <= hi; });
  };
  switch (cfg.algorithm) {
    case Algorithm::FB:
      if (!in_range(cfg.gamma, eps, 2.0 - eps)) throw Error(ErrorCode::InvalidSchedule, "FB gamma outside [eps, 2-eps]");
      if (!in_range(cfg.lambda, eps, 1.0)) throw Error(ErrorCode::InvalidSchedule, "FB lambda outside [eps, 1]");
      break;
    case Algorithm::DR:
      if (cfg.gamma.empty() || !(cfg.gamma.front() > 0.0) || !std::isfinite(cfg.gamma.front()) ||
          std::any_of(cfg.gamma.begin(), cfg.gamma.end(), [&](double g) { return g != cfg.gamma.front(); })) {
        throw Error(ErrorCode::InvalidSchedule, "DR gamma must be a positive constant");
      }
      if (!in_range(cfg.lambda, eps, 2.0 - eps)) throw Error(ErrorCode::InvalidSchedule, "DR lambda outside [eps, 2-eps]");
      break;
    case Algorithm::AFB:
      if (!(cfg.theta0 > 0.0 && cfg.theta0 <= 1.0)) throw Error(ErrorCode::InvalidSchedule, "theta0 outside (0, 1]");
      break;
    case Algorithm::ALM:
    case Algorithm::FALM:
      if (!(cfg.mu1 > 0.0) || !(cfg.mu2 > 0.0)) throw Error(ErrorCode::InvalidSchedule, "mu1, mu2 must be positive");
      break;
    case Algorithm::MPA:
      if (!cfg.alpha_weights.empty()) {
        if (cfg.alpha_weights.size() != p.coupling.n_agents()) {
          throw Error(ErrorCode::InvalidWeights, "need one weight per agent");
        }
        double sum = 0.0;
        for (double a : cfg.alpha_weights) {
          if (!(a > 0.0)) throw Error(ErrorCode::InvalidWeights, "weights must be positive");
          sum += a;
        }
        if (std::abs(sum - 1.0) > 1e-12) throw Error(ErrorCode::InvalidWeights, "weights must sum to 1");
      }
      break;
    case Algorithm::VN:
    case Algorithm::Dykstra:
      break;
  }
}

using StepResult = std::pair<const ProductVector*, double>;

SolveReport run_fb(const Problem& p, const SolverConfig& cfg, ConsensusChannel& ch) {
  const auto& c = p.coupling;
  Monitor mon(p, cfg, ch, false);
  ProductVector s = scatter(p.start(), c);
  ProductVector y(c);
  mon.prime(s);
  return drive(cfg, mon, [&](std::size_t k) -> StepResult {
    const double gamma = schedule_at(cfg.gamma, k);
    const double lambda = schedule_at(cfg.lambda, k);
    combine(y, 1.0 - gamma, s, gamma, mon.projection());
    const ProductVector v = ch.average(y, k, ExchangePurpose::Algorithm);
    combine(s, 1.0 - lambda, s, lambda, v);
    return {&s, 0.0};
  });
}

SolveReport run_afb(const Problem& p, const SolverConfig& cfg, ConsensusChannel& ch) {
  const auto& c = p.coupling;
  Monitor mon(p, cfg, ch, false);
  ProductVector s = scatter(p.start(), c);
  ProductVector g = s;
  ProductVector y(c);
  double theta = cfg.theta0;
  return drive(cfg, mon, [&](std::size_t k) -> StepResult {
    combine(y, 1.0 - theta, s, theta, g);
    const ProductVector v = ch.average(project_blocks(p, y), k, ExchangePurpose::Algorithm);
    combine(g, (theta - 1.0) / theta, s, 1.0 / theta, v);
    s = v;
    theta = theta_next(theta);
    return {&s, 0.0};
  });
}

SolveReport run_dr(const Problem& p, const SolverConfig& cfg, ConsensusChannel& ch) {
  const auto& c = p.coupling;
  Monitor mon(p, cfg, ch, true);
  const double gamma = cfg.gamma.front();
  ProductVector y = scatter(p.start(), c);
  ProductVector s(c);
  ProductVector z(c);
  return drive(cfg, mon, [&](std::size_t k) -> StepResult {
    const double lambda = schedule_at(cfg.lambda, k);
    combine(s, 1.0 / (gamma + 1.0), y, gamma / (gamma + 1.0), project_blocks(p, y));
    combine(z, 2.0, s, -1.0, y);
    const ProductVector v = ch.average(z, k, ExchangePurpose::Algorithm);
    auto yv = y.values();
    auto sv = s.values();
    auto vv = v.values();
    for (std::size_t q = 0; q < yv.size(); ++q) {
      yv[q] += lambda * ((1.0 - gamma) / (gamma + 1.0) * sv[q] - yv[q] / (gamma + 1.0) +
                         gamma / (gamma + 1.0) * vv[q]);
    }
    // The shadow sequence s carries the minimiser of F2.
    return {&s, 0.0};
  });
}

// One ALM half-sweep shared by ALM and FALM: from the anchor point (Y or Z)
// and its dual (xi or beta), produce S, nu, the new Y and the new xi.
struct AlmSweep {
  ProductVector s, nu, y, xi;
};

AlmSweep alm_sweep(const Problem& p, const SolverConfig& cfg, ConsensusChannel& ch, std::size_t k,
                   const ProductVector& anchor, const ProductVector& dual) {
  const auto& c = p.coupling;
  const double mu1 = cfg.mu1;
  const double mu2 = cfg.mu2;
  AlmSweep out{ProductVector(c), ProductVector(c), ProductVector(c), ProductVector(c)};
  ProductVector w(c);
  combine(w, 1.0, anchor, -mu1, dual);
  combine(out.s, 1.0 / (mu1 + 1.0), w, mu1 / (mu1 + 1.0), project_blocks(p, w));
  auto nu = out.nu.values();
  auto sv = out.s.values();
  auto av = anchor.values();
  auto dv = dual.values();
  for (std::size_t q = 0; q < nu.size(); ++q) nu[q] = -dv[q] - (sv[q] - av[q]) / mu1;
  ProductVector u(c);
  combine(u, 1.0, out.s, -mu2, out.nu);
  const ProductVector v = ch.average(u, k, ExchangePurpose::Algorithm);
  combine(out.y, 1.0 / (mu2 + 1.0), u, mu2 / (mu2 + 1.0), v);
  auto xi = out.xi.values();
  auto yv = out.y.values();
  for (std::size_t q = 0; q < xi.size(); ++q) xi[q] = -nu[q] + (sv[q] - yv[q]) / mu2;
  return out;
}

SolveReport run_alm(const Problem& p, const SolverConfig& cfg, ConsensusChannel& ch) {
  const auto& c = p.coupling;
  Monitor mon(p, cfg, ch, true);
  ProductVector y = scatter(p.start(), c);
  ProductVector xi(c);
  combine(xi, 1.0, y, -1.0, ch.average(y, 0, ExchangePurpose::Algorithm));
  return drive(cfg, mon, [&](std::size_t k) -> StepResult {
    AlmSweep sw = alm_sweep(p, cfg, ch, k, y, xi);
    y = std::move(sw.y);
    xi = std::move(sw.xi);
    return {&y, 0.0};
  });
}

SolveReport run_falm(const Problem& p, const SolverConfig& cfg, ConsensusChannel& ch) {
  const auto& c = p.coupling;
  Monitor mon(p, cfg, ch, true);
  ProductVector y = scatter(p.start(), c);
  ProductVector z = y;
  ProductVector beta(c);
  combine(beta, 1.0, z, -1.0, ch.average(z, 0, ExchangePurpose::Algorithm));
  ProductVector xi = beta;
  double t = 1.0;
  return drive(cfg, mon, [&](std::size_t k) -> StepResult {
    AlmSweep sw = alm_sweep(p, cfg, ch, k, z, beta);
    const double t_new = t_next(t);
    const double momentum = (t - 1.0) / t_new;
    combine(z, 1.0 + momentum, sw.y, -momentum, y);
    combine(beta, 1.0 + momentum, sw.xi, -momentum, xi);
    y = std::move(sw.y);
    xi = std::move(sw.xi);
    t = t_new;
    return {&y, 0.0};
  });
}

SolveReport run_vn(const Problem& p, const SolverConfig& cfg, ConsensusChannel& ch) {
  Monitor mon(p, cfg, ch, false);
  ProductVector v = scatter(p.start(), p.coupling);
  mon.prime(v);
  return drive(cfg, mon, [&](std::size_t k) -> StepResult {
    const ProductVector s = mon.projection();
    v = ch.average(s, k, ExchangePurpose::Algorithm);
    return {&v, distance(v.values(), s.values())};
  });
}

SolveReport run_dykstra(const Problem& p, const SolverConfig& cfg, ConsensusChannel& ch) {
  const auto& c = p.coupling;
  Monitor mon(p, cfg, ch, false);
  ProductVector v = scatter(p.start(), c);
  ProductVector dual(c);
  ProductVector shifted(c);
  // V can sit still for several rounds while only the duals move, which R1 at
  // V reads as converged. Such a plateau ends when some agent's shifted point
  // v_i - lambda_i reaches its set, so an agent whose shifted point is still
  // getting closer reports that relative decrease as its change.
  std::vector<double> approach(c.n_agents(), 0.0), shifted_d(c.n_agents(), -1.0);
  mon.set_extra_rc(&approach);
  return drive(cfg, mon, [&](std::size_t k) -> StepResult {
    combine(shifted, 1.0, v, -1.0, dual);
    const ProductVector s = project_blocks(p, shifted);
    for (AgentId i = 0; i < c.n_agents(); ++i) {
      const double d = distance(shifted.block(i), s.block(i));
      approach[i] = shifted_d[i] < 0.0 ? 0.0 : guarded_ratio(std::max(shifted_d[i] - d, 0.0), shifted_d[i]);
      shifted_d[i] = d;
    }
    // Dual increment uses the point the agent projected from (the v it held
    // before this round's averaging).
    auto dv = dual.values();
    auto sv = s.values();
    auto vv = v.values();
    for (std::size_t q = 0; q < dv.size(); ++q) dv[q] += sv[q] - vv[q];
    v = ch.average(s, k, ExchangePurpose::Algorithm);
    return {&v, distance(v.values(), s.values())};
  });
}

SolveReport run_mpa(const Problem& p, const SolverConfig& cfg, ConsensusChannel& ch) {
  const auto& c = p.coupling;
  Monitor mon(p, cfg, ch, false);
  std::vector<double> weights = cfg.alpha_weights;
  if (weights.empty()) weights.assign(c.n_agents(), 1.0 / static_cast<double>(c.n_agents()));
  GlobalVector v = p.start();
  ProductVector lifted = scatter(v, c);
  mon.prime(lifted);
  return drive(cfg, mon, [&](std::size_t k) -> StepResult {
    v = ch.combine_all(v, mon.projection(), weights, k);
    lifted = scatter(v, c);
    return {&lifted, 0.0};
  });
}

}  // namespace

double objective_f1(const ProductVector& s, const Problem& p) { return half_sq_dist_sum(p, s); }

double objective_f2(const ProductVector& s, const Problem& p) {
  const double r = consensus_residual(s, p.coupling);
  return half_sq_dist_sum(p, s) + 0.5 * r * r;
}

SolveReport solve(const Problem& problem, const SolverConfig& config, ConsensusChannel& channel) {
  problem.validate();
  validate_config(problem, config);
  switch (config.algorithm) {
    case Algorithm::FB: return run_fb(problem, config, channel);
    case Algorithm::AFB: return run_afb(problem, config, channel);
    case Algorithm::DR: return run_dr(problem, config, channel);
    case Algorithm::ALM: return run_alm(problem, config, channel);
    case Algorithm::FALM: return run_falm(problem, config, channel);
    case Algorithm::VN: return run_vn(problem, config, channel);
    case Algorithm::Dykstra: return run_dykstra(problem, config, channel);
    case Algorithm::MPA: return run_mpa(problem, config, channel);
  }
  throw Error(ErrorCode::InvalidSchedule, "unknown algorithm");
}

SolveReport solve(const Problem& problem, const SolverConfig& config) {
  DirectChannel channel(problem.coupling);
  return solve(problem, config, channel);
}

namespace {
SolveReport solve_as(const Problem& problem, SolverConfig config, Algorithm a) {
  config.algorithm = a;
  return solve(problem, config);
}
}  // namespace

SolveReport solve_fb(const Problem& p, SolverConfig c) { return solve_as(p, std::move(c), Algorithm::FB); }
SolveReport solve_afb(const Problem& p, SolverConfig c) { return solve_as(p, std::move(c), Algorithm::AFB); }
SolveReport solve_dr(const Problem& p, SolverConfig c) { return solve_as(p, std::move(c), Algorithm::DR); }
SolveReport solve_alm(const Problem& p, SolverConfig c) { return solve_as(p, std::move(c), Algorithm::ALM); }
SolveReport solve_falm(const Problem& p, SolverConfig c) { return solve_as(p, std::move(c), Algorithm::FALM); }
SolveReport solve_vn(const Problem& p, SolverConfig c) { return solve_as(p, std::move(c), Algorithm::VN); }
SolveReport solve_dykstra(const Problem& p, SolverConfig c) { return solve_as(p, std::move(c), Algorithm::Dykstra); }
SolveReport solve_mpa(const Problem& p, SolverConfig c) { return solve_as(p, std::move(c), Algorithm::MPA); }

}  // namespace cfp
