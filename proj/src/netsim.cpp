#include "cfp/netsim.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <string>

#include "cfp/error.hpp"

namespace cfp {

namespace {

std::vector<AgentId> resolve_order(std::span<const AgentId> order, std::size_t n) {
  std::vector<AgentId> out(order.begin(), order.end());
  if (out.empty()) {
    out.resize(n);
    std::iota(out.begin(), out.end(), AgentId{0});
    return out;
  }
  std::vector<AgentId> sorted = out;
  std::sort(sorted.begin(), sorted.end());
  bool permutation = sorted.size() == n;
  for (std::size_t i = 0; permutation && i < n; ++i) permutation = sorted[i] == i;
  if (!permutation) throw Error(ErrorCode::InvalidSchedule, "scheduler order must be a permutation of the agents");
  return out;
}

std::size_t sharer_position(const CouplingStructure& c, VarId j, AgentId agent) {
  const auto sh = c.sharers(j);
  return static_cast<std::size_t>(std::lower_bound(sh.begin(), sh.end(), agent) - sh.begin());
}

}  // namespace

ExchangeResult exchange_shared(const ProductVector& contributions, const CouplingStructure& c,
                               std::size_t round, std::span<const AgentId> order) {
  if (!contributions.conforms_to(c)) {
    throw Error(ErrorCode::LengthMismatch, "contributions do not match the coupling layout");
  }
  const std::vector<AgentId> schedule = resolve_order(order, c.n_agents());
  ExchangeResult out{ProductVector(c), RoundLog{}};
  out.log.round = round;
  out.log.compute_order = schedule;

  // Send phase.
  for (AgentId i : schedule) {
    const auto vars = c.vars(i);
    const auto block = contributions.block(i);
    for (std::size_t p = 0; p < vars.size(); ++p) {
      for (AgentId k : c.sharers(vars[p])) {
        if (k == i) continue;
        out.log.messages.push_back(Message{i, k, round, {{vars[p], block[p]}}});
      }
    }
  }

  // Delivery: inbox[i][p][r] holds the copy of the p-th variable of agent i
  // held by its r-th sharer.
  std::vector<std::vector<std::vector<double>>> inbox(c.n_agents());
  for (AgentId i = 0; i < c.n_agents(); ++i) {
    const auto vars = c.vars(i);
    inbox[i].resize(vars.size());
    for (std::size_t p = 0; p < vars.size(); ++p) {
      inbox[i][p].assign(c.degree(vars[p]), 0.0);
      inbox[i][p][sharer_position(c, vars[p], i)] = contributions.block(i)[p];
    }
  }
  for (const Message& m : out.log.messages) {
    for (const auto& [j, value] : m.payload) {
      inbox[m.to][c.local_index(m.to, j)][sharer_position(c, j, m.from)] = value;
    }
  }

  // Compute phase; summation follows the sharer order, never the schedule.
  for (AgentId i : schedule) {
    auto dst = out.averaged.block(i);
    for (std::size_t p = 0; p < dst.size(); ++p) {
      double sum = 0.0;
      for (double value : inbox[i][p]) sum += value;
      dst[p] = sum / static_cast<double>(inbox[i][p].size());
    }
  }
  return out;
}

NetworkChannel::NetworkChannel(const CouplingStructure& c, std::vector<AgentId> order, bool keep_logs)
    : coupling_(c), order_(resolve_order(order, c.n_agents())), keep_logs_(keep_logs) {}

ProductVector NetworkChannel::average(const ProductVector& contributions, std::size_t round,
                                      ExchangePurpose purpose) {
  ExchangeResult r = exchange_shared(contributions, coupling_, round, order_);
  count(r.log.messages.size(), purpose);
  if (keep_logs_) {
    r.log.purpose = purpose;
    logs_.push_back(std::move(r.log));
  }
  return std::move(r.averaged);
}

GlobalVector NetworkChannel::combine_all(const GlobalVector& v, const ProductVector& projections,
                                         std::span<const double> weights, std::size_t round) {
  const auto& c = coupling_;
  RoundLog log;
  log.round = round;
  log.all_to_all = true;
  log.compute_order = order_;
  for (AgentId i : order_) {
    Message m{i, 0, round, {}};
    const auto vars = c.vars(i);
    const auto block = projections.block(i);
    for (std::size_t p = 0; p < vars.size(); ++p) m.payload.emplace_back(vars[p], block[p]);
    for (AgentId k = 0; k < c.n_agents(); ++k) {
      if (k == i) continue;
      m.to = k;
      log.messages.push_back(m);
    }
  }

  // Every agent rebuilds the full projection set from its own block plus the
  // broadcasts it received, then applies the shared combination rule.
  GlobalVector result;
  for (AgentId receiver : order_) {
    ProductVector received(c);
    const auto own = projections.block(receiver);
    std::copy(own.begin(), own.end(), received.block(receiver).begin());
    for (const Message& m : log.messages) {
      if (m.to != receiver) continue;
      auto dst = received.block(m.from);
      for (std::size_t p = 0; p < m.payload.size(); ++p) dst[p] = m.payload[p].second;
    }
    GlobalVector local = mean_projection_combine(v, received, weights, c);
    if (result.size() == 0) {
      result = std::move(local);
    } else if (!(local == result)) {
      throw Error(ErrorCode::NumericFailure, "agents disagree after all-to-all combination");
    }
  }
  count(log.messages.size(), ExchangePurpose::Algorithm);
  if (keep_logs_) logs_.push_back(std::move(log));
  return result;
}

DistributedRun run_distributed(const Problem& problem, const SolverConfig& config, std::vector<AgentId> order,
                               bool keep_logs) {
  NetworkChannel channel(problem.coupling, std::move(order), keep_logs);
  DistributedRun run;
  run.report = solve(problem, config, channel);
  run.logs = channel.logs();
  return run;
}

void write_round_log_csv(std::ostream& os, std::span<const RoundLog> logs) {
  os << "round,from,to,n_values\n";
  for (const RoundLog& log : logs) {
    for (const Message& m : log.messages) {
      os << m.round << ',' << m.from << ',' << m.to << ',' << m.payload.size() << '\n';
    }
  }
}

}  // namespace cfp
