#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dmimo/channel.hpp"
#include "dmimo/errors.hpp"
#include "dmimo/random.hpp"

namespace dmimo {

enum class PlacementMode { disc, ring };
enum class Phase1Policy { min, median, max };
enum class ZfNormalization { paper_literal, power_exact };

inline std::string_view to_string(PlacementMode m) { return m == PlacementMode::disc ? "disc" : "ring"; }

inline std::string_view to_string(Phase1Policy p) {
  switch (p) {
    case Phase1Policy::min: return "min";
    case Phase1Policy::median: return "median";
    case Phase1Policy::max: return "max";
  }
  return "?";
}

inline std::string_view to_string(ZfNormalization n) {
  return n == ZfNormalization::paper_literal ? "paper-literal" : "power-exact";
}

inline std::string_view to_string(NlosModel m) { return m == NlosModel::max_rule ? "max" : "simplified"; }

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

/// Thermal noise power in mW over `bandwidth_hz` for noise figure `nf_db`.
inline double noise_power_mw(double bandwidth_hz, double nf_db) {
  return dbm_to_mw(-174.0 + 10.0 * std::log10(bandwidth_hz) + nf_db);
}

/// Scenario parameters. Defaults are the reference deployment: 33/26 dBm
/// BS/node power, (4, 2, 2, 2) antennas, 10 MHz per phase, 20 m BS and 2 m UE.
struct ScenarioConfig {
  int nodes = 10;
  double radius_m = 100.0;
  double node_height_min_m = 2.5;
  double node_height_max_m = 25.0;
  double bs_height_m = 20.0;
  double ue_height_m = 2.0;
  double d_bs_ue_m = 1000.0;
  double p_bs_dbm = 33.0;
  double p_node_dbm = 26.0;
  int n_t_bs = 4;
  int n_t_node = 2;
  int n_r_node = 2;
  int n_r_ue = 2;
  double b1_hz = 10e6;
  double b2_hz = 10e6;
  double fc_ghz = 3.5;
  double nf_db = 7.0;
  bool shadow_fading = true;
  double sigma_sf_db = 7.82;
  NlosModel nlos_model = NlosModel::max_rule;
  PlacementMode placement = PlacementMode::disc;
  Phase1Policy phase1_policy = Phase1Policy::min;
  ZfNormalization normalization = ZfNormalization::paper_literal;
  double t1_s = 1.0;

  /// Phase-1 layer count N_s.
  int phase1_layers() const { return std::min(n_t_bs, n_r_node); }

  /// Phase-2 layer count; the node antennas only count when nodes exist.
  int phase2_layers() const {
    return nodes >= 1 ? std::min({n_t_bs, n_t_node, n_r_ue}) : std::min(n_t_bs, n_r_ue);
  }

  double bs_energy() const { return dbm_to_mw(p_bs_dbm); }
  double node_energy() const { return dbm_to_mw(p_node_dbm); }
  double phase1_noise() const { return noise_power_mw(b1_hz, nf_db); }
  double phase2_noise() const { return noise_power_mw(b2_hz, nf_db); }
  double effective_sigma_sf() const { return shadow_fading ? sigma_sf_db : 0.0; }

  void validate() const {
    auto require = [](bool ok, const char* key, const char* what) {
      if (!ok) throw ConfigError(key, what);
    };
    auto finite = [](double v) { return std::isfinite(v); };
    require(nodes >= 0, "nodes", "node count must be >= 0");
    require(finite(radius_m) && radius_m >= 0.0, "radius", "radius must be >= 0");
    require(finite(node_height_min_m) && node_height_min_m > 0.0, "node_height_min",
            "node heights must be > 0");
    require(finite(node_height_max_m) && node_height_max_m >= node_height_min_m, "node_height_max",
            "node_height_max must be >= node_height_min");
    require(finite(bs_height_m) && bs_height_m > 0.0, "bs_height", "height must be > 0");
    require(finite(ue_height_m) && ue_height_m > 0.0, "ue_height", "height must be > 0");
    require(finite(d_bs_ue_m) && d_bs_ue_m > 0.0, "d_bs_ue", "BS-UE distance must be > 0");
    require(finite(p_bs_dbm), "p_bs", "power must be finite");
    require(finite(p_node_dbm), "p_node", "power must be finite");
    require(n_t_bs >= 1, "n_t_bs", "antenna count must be >= 1");
    require(n_t_node >= 1, "n_t_node", "antenna count must be >= 1");
    require(n_r_node >= 1, "n_r_node", "antenna count must be >= 1");
    require(n_r_ue >= 1, "n_r_ue", "antenna count must be >= 1");
    require(finite(b1_hz) && b1_hz > 0.0, "b1", "bandwidth must be > 0");
    require(finite(b2_hz) && b2_hz > 0.0, "b2", "bandwidth must be > 0");
    require(fc_ghz >= 0.5 && fc_ghz <= 100.0, "fc", "carrier must lie in [0.5, 100] GHz");
    require(finite(nf_db), "nf", "noise figure must be finite");
    require(finite(sigma_sf_db) && sigma_sf_db >= 0.0, "sigma_sf", "shadowing sigma must be >= 0");
    require(finite(t1_s) && t1_s > 0.0, "t1", "phase-1 duration must be > 0");
    require(n_r_ue <= n_t_bs, "n_r_ue", "zero forcing needs n_r_ue <= n_t_bs");
    require(nodes == 0 || n_r_ue <= n_t_node, "n_r_ue", "zero forcing needs n_r_ue <= n_t_node");
  }
};

/// Node position relative to the BS at the origin.
struct NodePlacement {
  double x_m;
  double y_m;
  double height_m;

  double distance_to_bs() const { return std::hypot(x_m, y_m); }
};

/// Places `cfg.nodes` nodes around the BS. Disc mode is uniform over the
/// disc area, ring mode puts every node on the circle. Each node consumes
/// radius, angle and height draws in that order.
inline std::vector<NodePlacement> sample_nodes(const ScenarioConfig& cfg, RandomStream& rng) {
  std::vector<NodePlacement> out;
  out.reserve(static_cast<std::size_t>(std::max(cfg.nodes, 0)));
  for (int k = 0; k < cfg.nodes; ++k) {
    const double u = rng.uniform();
    const double r = cfg.placement == PlacementMode::disc ? cfg.radius_m * std::sqrt(u) : cfg.radius_m;
    const double theta = 2.0 * std::numbers::pi * rng.uniform();
    const double h = cfg.node_height_min_m == cfg.node_height_max_m
                         ? cfg.node_height_min_m
                         : rng.uniform(cfg.node_height_min_m, cfg.node_height_max_m);
    out.push_back({r * std::cos(theta), r * std::sin(theta), h});
  }
  return out;
}

/// All channels of one trial.
struct LinkSet {
  std::vector<ChannelRealization> phase1;       // BS -> node u, n_r_node x n_t_bs
  std::vector<ChannelRealization> phase2_nodes;  // node u -> UE, n_r_ue x n_t_node
  ChannelRealization bs_ue;                      // BS -> UE, n_r_ue x n_t_bs
  int clamped_links = 0;

  std::size_t phase2_link_count() const { return phase2_nodes.size() + 1; }
};

/// Builds every link of a trial from the trial stream.
///
/// Draw order is fixed so the BS->UE link comes first in both the
/// phase-2 fading and the shadowing substreams, which keeps it identical for
/// any node count. `phase2_attempt` > 0 redraws only the phase-2 small-scale
/// fading (used when a draw is rank deficient).
inline LinkSet build_links(const ScenarioConfig& cfg, std::span<const NodePlacement> nodes,
                           const RandomStream& trial, std::uint64_t phase2_attempt = 0) {
  RandomStream fading1 = trial.substream(StreamPurpose::phase1_fading);
  RandomStream fading2 = trial.substream(StreamPurpose::phase2_fading);
  if (phase2_attempt > 0) fading2 = RandomStream(hash_combine(fading2.seed(), phase2_attempt));
  RandomStream shadow = trial.substream(StreamPurpose::shadowing);
  const double sigma = cfg.effective_sigma_sf();
  int clamped = 0;

  auto gain_for = [&](const LinkGeometry& geom) {
    const PathLoss pl = umi_pathloss_db(geom, cfg.nlos_model);
    if (pl.clamped) ++clamped;
    return linear_gain(pl.db, shadow_fading_db(shadow, sigma));
  };

  const LinkGeometry bs_ue_geom{cfg.d_bs_ue_m, cfg.bs_height_m, cfg.ue_height_m, cfg.fc_ghz};
  ComplexMatrix bs_ue_h = sample_rayleigh(cfg.n_r_ue, cfg.n_t_bs, fading2);
  const double bs_ue_gain = gain_for(bs_ue_geom);
  LinkSet links{{}, {}, ChannelRealization(std::move(bs_ue_h), bs_ue_gain), 0};

  links.phase1.reserve(nodes.size());
  links.phase2_nodes.reserve(nodes.size());
  for (const NodePlacement& n : nodes) {
    const LinkGeometry to_node{n.distance_to_bs(), cfg.bs_height_m, n.height_m, cfg.fc_ghz};
    const LinkGeometry to_ue{std::hypot(cfg.d_bs_ue_m - n.x_m, n.y_m), n.height_m, cfg.ue_height_m,
                             cfg.fc_ghz};
    ComplexMatrix h1 = sample_rayleigh(cfg.n_r_node, cfg.n_t_bs, fading1);
    const double g1 = gain_for(to_node);
    links.phase1.emplace_back(std::move(h1), g1);
    ComplexMatrix h2 = sample_rayleigh(cfg.n_r_ue, cfg.n_t_node, fading2);
    const double g2 = gain_for(to_ue);
    links.phase2_nodes.emplace_back(std::move(h2), g2);
  }
  links.clamped_links = clamped;
  return links;
}

}  // namespace dmimo
