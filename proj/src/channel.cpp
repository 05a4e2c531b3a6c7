#include "cfp/channel.hpp"

namespace cfp {

std::size_t exchange_message_count(const CouplingStructure& c) {
  std::size_t n = 0;
  for (VarId j = 0; j < c.n_global(); ++j) n += c.degree(j) * (c.degree(j) - 1);
  return n;
}

std::size_t broadcast_message_count(const CouplingStructure& c) {
  return c.n_agents() * (c.n_agents() - 1);
}

GlobalVector mean_projection_combine(const GlobalVector& v, const ProductVector& projections,
                                     std::span<const double> weights, const CouplingStructure& c) {
  GlobalVector out(c.n_global());
  auto p = projections.values();
  for (VarId j = 0; j < c.n_global(); ++j) {
    // Agents outside I_j leave v_j unchanged, contributing alpha_i v_j.
    double outside = 1.0;
    double sum = 0.0;
    const auto sharers = c.sharers(j);
    const auto slots = c.slots(j);
    for (std::size_t q = 0; q < sharers.size(); ++q) {
      sum += weights[sharers[q]] * p[slots[q]];
      outside -= weights[sharers[q]];
    }
    out[j] = sum + outside * v[j];
  }
  return out;
}

ProductVector DirectChannel::average(const ProductVector& contributions, std::size_t /*round*/,
                                     ExchangePurpose purpose) {
  count(exchange_message_count(coupling_), purpose);
  return consensus_project(contributions, coupling_);
}

GlobalVector DirectChannel::combine_all(const GlobalVector& v, const ProductVector& projections,
                                        std::span<const double> weights, std::size_t /*round*/) {
  count(broadcast_message_count(coupling_), ExchangePurpose::Algorithm);
  return mean_projection_combine(v, projections, weights, coupling_);
}

}  // namespace cfp
