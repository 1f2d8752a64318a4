#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "dmimo/channel.hpp"
#include "dmimo/errors.hpp"
#include "dmimo/mimo_math.hpp"
#include "dmimo/scenario.hpp"

namespace dmimo {

/// Front-haul outcome: every node must decode the same stream, so the
/// selected policy rate times B1 is the phase-1 capacity.
struct Phase1Result {
  std::vector<double> node_rates;  // b/s/Hz
  double rate = 0.0;               // policy statistic, b/s/Hz
  double c1 = 0.0;                 // b/s
  std::vector<std::size_t> participating;
  Phase1Policy policy = Phase1Policy::min;
};

/// Mutual information of one BS->node link with an identity precoder and
/// the BS power split evenly over `n_s` layers.
inline double node_rate(const ChannelRealization& link, double e_s, int n_s, double sigma2) {
  if (n_s < 1) throw DomainError("node_rate: layer count must be >= 1");
  if (!(sigma2 > 0.0)) throw DomainError("node_rate: noise power must be > 0");
  return log_det_capacity(hermitian_gram(link.h), e_s * link.gain / (n_s * sigma2));
}

/// Lower median: element ceil(n/2) - 1 of the ascending sort.
inline double lower_median(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted[(sorted.size() + 1) / 2 - 1];
}

inline double policy_rate(std::span<const double> rates, Phase1Policy policy) {
  if (rates.empty()) throw DomainError("phase-1 policy needs at least one node rate");
  switch (policy) {
    case Phase1Policy::min: return *std::min_element(rates.begin(), rates.end());
    case Phase1Policy::max: return *std::max_element(rates.begin(), rates.end());
    case Phase1Policy::median: return lower_median(rates);
  }
  return 0.0;
}

/// Applies the phase-1 policy. Under min every node takes part in phase 2,
/// under median the nodes at or above the median, under max only the first
/// best node. An empty rate list means there are no nodes; the baseline path
/// must not call this.
inline Phase1Result phase1_capacity(std::span<const double> rates, Phase1Policy policy, double b1_hz) {
  if (rates.empty()) throw DomainError("phase1_capacity: no node rates (U = 0 runs the baseline only)");
  Phase1Result out;
  out.node_rates.assign(rates.begin(), rates.end());
  out.policy = policy;
  out.rate = policy_rate(rates, policy);
  out.c1 = out.rate * b1_hz;
  switch (policy) {
    case Phase1Policy::min:
      for (std::size_t i = 0; i < rates.size(); ++i) out.participating.push_back(i);
      break;
    case Phase1Policy::median:
      for (std::size_t i = 0; i < rates.size(); ++i) {
        if (rates[i] >= out.rate) out.participating.push_back(i);
      }
      break;
    case Phase1Policy::max:
      out.participating.push_back(
          static_cast<std::size_t>(std::max_element(rates.begin(), rates.end()) - rates.begin()));
      break;
  }
  return out;
}

/// Per-node rates for every phase-1 link of a trial.
inline std::vector<double> phase1_rates(const ScenarioConfig& cfg, std::span<const ChannelRealization> links) {
  std::vector<double> rates;
  rates.reserve(links.size());
  const double e_s = cfg.bs_energy();
  const double sigma2 = cfg.phase1_noise();
  const int n_s = cfg.phase1_layers();
  for (const auto& link : links) rates.push_back(node_rate(link, e_s, n_s, sigma2));
  return rates;
}

}  // namespace dmimo
