#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "cfp/channel.hpp"
#include "cfp/coupling.hpp"
#include "cfp/solvers.hpp"

namespace cfp {

struct Message {
  AgentId from = 0;
  AgentId to = 0;
  std::size_t round = 0;
  std::vector<std::pair<VarId, double>> payload;
};

struct RoundLog {
  std::size_t round = 0;
  ExchangePurpose purpose = ExchangePurpose::Algorithm;
  bool all_to_all = false;
  std::vector<Message> messages;
  std::vector<AgentId> compute_order;  // order in which agents ran their step
};

struct ExchangeResult {
  ProductVector averaged;  // every agent's averaged view of its own variables
  RoundLog log;
};

// One synchronous averaging round: each sharer of variable j sends its copy
// to every co-sharer, then every agent averages what it holds. `order` is
// the scheduler order (identity when empty); results do not depend on it.
ExchangeResult exchange_shared(const ProductVector& contributions, const CouplingStructure& c,
                               std::size_t round = 0, std::span<const AgentId> order = {});

// Routes every solver exchange through explicit messages.
class NetworkChannel final : public ConsensusChannel {
 public:
  explicit NetworkChannel(const CouplingStructure& c, std::vector<AgentId> order = {}, bool keep_logs = true);

  ProductVector average(const ProductVector& contributions, std::size_t round,
                        ExchangePurpose purpose) override;
  GlobalVector combine_all(const GlobalVector& v, const ProductVector& projections,
                           std::span<const double> weights, std::size_t round) override;

  const std::vector<RoundLog>& logs() const { return logs_; }

 private:
  const CouplingStructure& coupling_;
  std::vector<AgentId> order_;
  bool keep_logs_;
  std::vector<RoundLog> logs_;
};

struct DistributedRun {
  SolveReport report;
  std::vector<RoundLog> logs;
};

DistributedRun run_distributed(const Problem& problem, const SolverConfig& config,
                               std::vector<AgentId> order = {}, bool keep_logs = true);

// CSV with header "round,from,to,n_values", one row per message.
void write_round_log_csv(std::ostream& os, std::span<const RoundLog> logs);

}  // namespace cfp
