#pragma once

#include <cstddef>
#include <span>

#include "cfp/coupling.hpp"

namespace cfp {

enum class ExchangePurpose { Algorithm, Detector };

// Carries every inter-agent data movement a solver performs. The direct
// channel computes results in place and counts messages from topology;
// the network simulator routes explicit messages. Both must return
// bit-identical values.
class ConsensusChannel {
 public:
  virtual ~ConsensusChannel() = default;

  // Every agent's view of the averaged shared variables, i.e. P_D(contributions).
  virtual ProductVector average(const ProductVector& contributions, std::size_t round,
                                ExchangePurpose purpose) = 0;

  // All-to-all combination of the mean projection method:
  // v+ = sum_i alpha_i P_{C_i}(v), with P_{C_i} acting only on J_i.
  virtual GlobalVector combine_all(const GlobalVector& v, const ProductVector& projections,
                                   std::span<const double> weights, std::size_t round) = 0;

  std::size_t messages() const { return messages_; }
  std::size_t detector_messages() const { return detector_messages_; }

 protected:
  void count(std::size_t n, ExchangePurpose purpose) {
    (purpose == ExchangePurpose::Algorithm ? messages_ : detector_messages_) += n;
  }

 private:
  std::size_t messages_ = 0;
  std::size_t detector_messages_ = 0;
};

// Messages of one neighbour averaging round: sum_j |I_j| (|I_j| - 1).
std::size_t exchange_message_count(const CouplingStructure& c);

// Messages of one all-to-all round: N (N - 1).
std::size_t broadcast_message_count(const CouplingStructure& c);

// Arithmetic of the mean projection combination, shared by every channel.
GlobalVector mean_projection_combine(const GlobalVector& v, const ProductVector& projections,
                                     std::span<const double> weights, const CouplingStructure& c);

class DirectChannel final : public ConsensusChannel {
 public:
  explicit DirectChannel(const CouplingStructure& c) : coupling_(c) {}

  ProductVector average(const ProductVector& contributions, std::size_t round,
                        ExchangePurpose purpose) override;
  GlobalVector combine_all(const GlobalVector& v, const ProductVector& projections,
                           std::span<const double> weights, std::size_t round) override;

 private:
  const CouplingStructure& coupling_;
};

}  // namespace cfp
