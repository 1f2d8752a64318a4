#pragma once

#include <cmath>
#include <sstream>
#include <utility>

#include "dmimo/errors.hpp"
#include "dmimo/mimo_math.hpp"
#include "dmimo/random.hpp"

namespace dmimo {

inline constexpr double kSpeedOfLight = 3.0e8;

/// Small-scale channel matrix paired with the large-scale linear power gain
/// shared by all of its entries.
struct ChannelRealization {
  ChannelRealization(ComplexMatrix h_, double gain_) : h(std::move(h_)), gain(gain_) {
    if (!(gain > 0.0) || !std::isfinite(gain)) {
      throw DomainError("ChannelRealization gain must be finite and > 0");
    }
  }

  ComplexMatrix h;
  double gain;
};

struct LinkGeometry {
  double d2d_m;
  double h_tx_m;
  double h_rx_m;
  double fc_ghz;

  void validate() const {
    if (!(d2d_m >= 0.0) || !std::isfinite(d2d_m)) throw DomainError("LinkGeometry: d2d must be >= 0");
    if (!(h_tx_m > 0.0) || !(h_rx_m > 0.0)) throw DomainError("LinkGeometry: heights must be > 0");
    if (!(fc_ghz >= 0.5 && fc_ghz <= 100.0)) {
      throw DomainError("LinkGeometry: fc must lie in [0.5, 100] GHz");
    }
  }
};

/// Which NLOS expression the UMi street-canyon model uses.
enum class NlosModel {
  max_rule,    // max(PL_LOS, PL'_NLOS)
  simplified,  // 32.4 + 20 log10(fc) + 31.9 log10(d3D)
};

struct PathLoss {
  double db;
  bool clamped;  // d3D was below the 1 m validity floor
};

namespace detail {

inline std::pair<double, bool> distance_3d(const LinkGeometry& g) {
  const double dh = g.h_tx_m - g.h_rx_m;
  const double d3d = std::sqrt(g.d2d_m * g.d2d_m + dh * dh);
  if (d3d < 1.0) return {1.0, true};
  return {d3d, false};
}

}  // namespace detail

/// Breakpoint distance d'_BP with 1 m effective environment height.
inline double umi_breakpoint_m(const LinkGeometry& g) {
  return 4.0 * (g.h_tx_m - 1.0) * (g.h_rx_m - 1.0) * g.fc_ghz * 1e9 / kSpeedOfLight;
}

/// UMi street-canyon LOS path loss (dual slope around the breakpoint). When
/// an effective height is not positive the breakpoint does not exist and the
/// first slope applies everywhere.
inline double umi_los_pathloss_db(const LinkGeometry& g) {
  const double d3d = detail::distance_3d(g).first;
  const double dbp = umi_breakpoint_m(g);
  const double log_fc = std::log10(g.fc_ghz);
  if (dbp <= 0.0 || g.d2d_m <= dbp) return 32.4 + 21.0 * std::log10(d3d) + 20.0 * log_fc;
  const double dh = g.h_tx_m - g.h_rx_m;
  return 32.4 + 40.0 * std::log10(d3d) + 20.0 * log_fc - 9.5 * std::log10(dbp * dbp + dh * dh);
}

/// UMi street-canyon PL'_NLOS.
inline double umi_nlos_prime_pathloss_db(const LinkGeometry& g) {
  const double d3d = detail::distance_3d(g).first;
  return 35.3 * std::log10(d3d) + 22.4 + 21.3 * std::log10(g.fc_ghz) - 0.3 * (g.h_rx_m - 1.5);
}

/// UMi street-canyon NLOS path loss in dB. The receiver is the UT side of
/// the standard's formulas, the transmitter the BS side.
inline PathLoss umi_pathloss_db(const LinkGeometry& g, NlosModel model = NlosModel::max_rule) {
  g.validate();
  const auto [d3d, clamped] = detail::distance_3d(g);
  if (model == NlosModel::simplified) {
    return {32.4 + 20.0 * std::log10(g.fc_ghz) + 31.9 * std::log10(d3d), clamped};
  }
  return {std::max(umi_los_pathloss_db(g), umi_nlos_prime_pathloss_db(g)), clamped};
}

/// Zero-mean Gaussian shadowing in dB. sigma = 0 returns 0 without drawing.
inline double shadow_fading_db(RandomStream& rng, double sigma_sf_db) {
  if (!(sigma_sf_db >= 0.0)) throw DomainError("shadow fading sigma must be >= 0");
  if (sigma_sf_db == 0.0) return 0.0;
  return sigma_sf_db * rng.normal();
}

inline double linear_gain(double pl_db, double sf_db) {
  if (!std::isfinite(pl_db) || !std::isfinite(sf_db)) {
    throw DomainError("linear_gain needs finite path loss and shadowing");
  }
  return std::pow(10.0, -(pl_db + sf_db) / 10.0);
}

/// n_rx x n_tx matrix of i.i.d. CN(0, 1) entries, filled row by row.
inline ComplexMatrix sample_rayleigh(Eigen::Index n_rx, Eigen::Index n_tx, RandomStream& rng) {
  if (n_rx < 1 || n_tx < 1) throw DimensionError("sample_rayleigh needs n_rx, n_tx >= 1");
  EigenMatrix h(n_rx, n_tx);
  for (Eigen::Index r = 0; r < n_rx; ++r) {
    for (Eigen::Index c = 0; c < n_tx; ++c) h(r, c) = rng.complex_normal();
  }
  return ComplexMatrix(std::move(h));
}

}  // namespace dmimo
