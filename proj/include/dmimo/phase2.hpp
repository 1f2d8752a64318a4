#pragma once

#include <cmath>
#include <span>
#include <sstream>
#include <vector>

#include "dmimo/channel.hpp"
#include "dmimo/errors.hpp"
#include "dmimo/mimo_math.hpp"
#include "dmimo/scenario.hpp"

namespace dmimo {

/// Large-scale budget of one transmitting entity (BS or node).
struct EntityGain {
  double gain;    // linear large-scale gain to the UE
  double energy;  // symbol energy, mW
  int n_t;        // transmit antennas

  /// sqrt(G E / N_t): the amplitude this entity adds to every layer.
  double amplitude() const { return std::sqrt(gain * energy / n_t); }
};

struct PrecoderSet {
  ComplexMatrix f_bs;
  std::vector<ComplexMatrix> f_nodes;
  ZfNormalization normalization = ZfNormalization::paper_literal;
};

/// Zero-forcing precoder of a single entity. The literal mode returns the raw
/// pseudo-inverse (H F = I); power-exact rescales it so that
/// trace(F F^H) equals the entity's antenna count.
inline ComplexMatrix zf_precoder(const ComplexMatrix& h, ZfNormalization mode) {
  ComplexMatrix f = pseudo_inverse(h);
  if (mode == ZfNormalization::paper_literal) return f;
  const double power = f.eigen().squaredNorm();
  const double gamma = std::sqrt(static_cast<double>(h.cols()) / power);
  return ComplexMatrix(gamma * f.eigen());
}

inline PrecoderSet zf_precoders(const ChannelRealization& bs_link,
                                std::span<const ChannelRealization> node_links, ZfNormalization mode) {
  PrecoderSet out{zf_precoder(bs_link.h, mode), {}, mode};
  out.f_nodes.reserve(node_links.size());
  for (const auto& link : node_links) out.f_nodes.push_back(zf_precoder(link.h, mode));
  return out;
}

/// Coherent ZF capacity in b/s/Hz: every layer sees the squared sum of the
/// entity amplitudes over the noise.
inline double phase2_capacity_closed(std::span<const EntityGain> entities, int n_s_bar, double sigma2) {
  if (!(sigma2 > 0.0)) throw DomainError("phase2_capacity_closed: noise power must be > 0");
  if (n_s_bar < 1) throw DomainError("phase2_capacity_closed: layer count must be >= 1");
  double amplitude = 0.0;
  for (const auto& e : entities) amplitude += e.amplitude();
  return n_s_bar * std::log2(amplitude * amplitude / sigma2 + 1.0);
}

/// log2 |M M^H / sigma2 + I| with M = sum of amplitude * H * F over entities.
/// `entities[0]` belongs to the BS, `entities[k + 1]` to node link k.
inline double phase2_capacity_logdet(const ChannelRealization& bs_link,
                                     std::span<const ChannelRealization> node_links,
                                     const PrecoderSet& precoders, std::span<const EntityGain> entities,
                                     double sigma2) {
  if (!(sigma2 > 0.0)) throw DomainError("phase2_capacity_logdet: noise power must be > 0");
  if (precoders.f_nodes.size() != node_links.size() || entities.size() != node_links.size() + 1) {
    throw DimensionError("phase2_capacity_logdet: links, precoders and gains differ in count");
  }
  auto term = [](const ChannelRealization& link, const ComplexMatrix& f) {
    if (link.h.cols() != f.rows()) {
      std::ostringstream msg;
      msg << "phase2_capacity_logdet: channel " << link.h.rows() << "x" << link.h.cols()
          << " does not conform with precoder " << f.rows() << "x" << f.cols();
      throw DimensionError(msg.str());
    }
    return EigenMatrix(link.h.eigen() * f.eigen());
  };
  EigenMatrix m = entities[0].amplitude() * term(bs_link, precoders.f_bs);
  for (std::size_t k = 0; k < node_links.size(); ++k) {
    const EigenMatrix hf = term(node_links[k], precoders.f_nodes[k]);
    if (hf.rows() != m.rows() || hf.cols() != m.cols()) {
      throw DimensionError("phase2_capacity_logdet: effective channels differ in shape");
    }
    m += entities[k + 1].amplitude() * hf;
  }
  return log_det_capacity(hermitian_gram(ComplexMatrix(std::move(m))), 1.0 / sigma2);
}

struct Phase2Result {
  PrecoderSet precoders;
  double c2_closed = 0.0;      // b/s/Hz
  double c2_logdet = 0.0;      // b/s/Hz
  double rate = 0.0;           // reported value, b/s/Hz
  double c2 = 0.0;             // rate * B2, b/s
  double baseline_rate = 0.0;  // BS alone, b/s/Hz
  double c_baseline = 0.0;     // b/s
  std::vector<double> per_entity_gain_terms;  // BS first
};

namespace detail {

struct Phase2Rates {
  double closed;
  double logdet;
  PrecoderSet precoders;
};

inline Phase2Rates phase2_rates(const ScenarioConfig& cfg, const ChannelRealization& bs_link,
                                std::span<const ChannelRealization> node_links) {
  std::vector<EntityGain> entities;
  entities.reserve(node_links.size() + 1);
  entities.push_back({bs_link.gain, cfg.bs_energy(), cfg.n_t_bs});
  for (const auto& link : node_links) entities.push_back({link.gain, cfg.node_energy(), cfg.n_t_node});
  const int layers = node_links.empty() ? std::min(cfg.n_t_bs, cfg.n_r_ue)
                                        : std::min({cfg.n_t_bs, cfg.n_t_node, cfg.n_r_ue});
  const double sigma2 = cfg.phase2_noise();
  PrecoderSet precoders = zf_precoders(bs_link, node_links, cfg.normalization);
  const double closed = phase2_capacity_closed(entities, layers, sigma2);
  const double logdet = phase2_capacity_logdet(bs_link, node_links, precoders, entities, sigma2);
  return {closed, logdet, std::move(precoders)};
}

}  // namespace detail

/// Phase-2 capacity for the participating nodes plus the BS-only baseline.
/// The reported rate is the closed form under literal (unnormalized) precoding and the
/// log-det value under power-exact precoding; the baseline is the same
/// quantity with no nodes. Throws SingularityError on a rank-deficient draw.
inline Phase2Result compute_phase2(const ScenarioConfig& cfg, const LinkSet& links,
                                   std::span<const std::size_t> participating) {
  std::vector<ChannelRealization> active;
  active.reserve(participating.size());
  for (std::size_t idx : participating) active.push_back(links.phase2_nodes.at(idx));

  auto joint = detail::phase2_rates(cfg, links.bs_ue, active);
  const auto alone = detail::phase2_rates(cfg, links.bs_ue, {});
  const bool literal = cfg.normalization == ZfNormalization::paper_literal;

  Phase2Result out{std::move(joint.precoders)};
  out.c2_closed = joint.closed;
  out.c2_logdet = joint.logdet;
  out.rate = literal ? joint.closed : joint.logdet;
  out.c2 = out.rate * cfg.b2_hz;
  out.baseline_rate = literal ? alone.closed : alone.logdet;
  out.c_baseline = out.baseline_rate * cfg.b2_hz;
  out.per_entity_gain_terms.push_back(EntityGain{links.bs_ue.gain, cfg.bs_energy(), cfg.n_t_bs}.amplitude());
  for (const auto& link : active) {
    out.per_entity_gain_terms.push_back(EntityGain{link.gain, cfg.node_energy(), cfg.n_t_node}.amplitude());
  }
  return out;
}

}  // namespace dmimo
