#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "dmimo/errors.hpp"
#include "dmimo/phase1.hpp"
#include "dmimo/phase2.hpp"
#include "dmimo/random.hpp"
#include "dmimo/scenario.hpp"
#include "dmimo/timing.hpp"

namespace dmimo {

/// Retries allowed when a phase-2 draw is rank deficient.
inline constexpr int kMaxZfResamples = 8;

struct TrialDiagnostics {
  int zf_resamples = 0;
  int clamped_links = 0;
};

struct TrialRecord {
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;
  std::vector<NodePlacement> nodes;
  std::optional<Phase1Result> phase1;  // absent for the baseline (no nodes)
  Phase2Result phase2;
  std::optional<TimingResult> timing;  // absent for the baseline
  TrialDiagnostics diagnostics;
};

/// One Monte Carlo draw: placement, links, phase 1, phase 2, timing.
/// Fully determined by (cfg, master_seed, trial_index).
inline TrialRecord run_trial(const ScenarioConfig& cfg, std::uint64_t master_seed, std::uint64_t trial_index) {
  cfg.validate();
  const RandomStream trial = RandomStream::for_trial(master_seed, trial_index);
  RandomStream placement = trial.substream(StreamPurpose::placement);
  std::vector<NodePlacement> nodes = sample_nodes(cfg, placement);

  TrialDiagnostics diag;
  for (int attempt = 0; attempt <= kMaxZfResamples; ++attempt) {
    const LinkSet links = build_links(cfg, nodes, trial, static_cast<std::uint64_t>(attempt));
    std::optional<Phase1Result> phase1;
    std::vector<std::size_t> participating;
    if (cfg.nodes > 0) {
      const std::vector<double> rates = phase1_rates(cfg, links.phase1);
      phase1 = phase1_capacity(rates, cfg.phase1_policy, cfg.b1_hz);
      participating = phase1->participating;
    }
    std::optional<Phase2Result> phase2;
    try {
      phase2 = compute_phase2(cfg, links, participating);
    } catch (const SingularityError&) {
      ++diag.zf_resamples;
      continue;
    }
    diag.clamped_links = links.clamped_links;
    std::optional<TimingResult> timing;
    if (phase1) timing = compare_to_baseline(phase1->c1, phase2->c2, phase2->c_baseline, cfg.t1_s);
    return TrialRecord{master_seed, trial_index,  std::move(nodes), std::move(phase1),
                       std::move(*phase2), timing, diag};
  }
  throw DegenerateTrialError("trial " + std::to_string(trial_index) +
                             ": phase-2 channels stayed rank deficient after " +
                             std::to_string(kMaxZfResamples) + " resamples");
}

// ---------------------------------------------------------------------------
// Sweeps

enum class Metric : std::size_t {
  c1_min,
  c1_median,
  c1_max,
  c2_closed,
  c2_logdet,
  c_baseline,
  t2,
  gain_ratio,
};

inline constexpr std::size_t kMetricCount = 8;

inline constexpr std::array<std::string_view, kMetricCount> kMetricNames = {
    "c1_min", "c1_median", "c1_max", "c2_closed", "c2_logdet", "c_baseline", "t2", "gain_ratio"};

using MetricRow = std::array<double, kMetricCount>;

/// Per-trial metrics; capacities in b/s/Hz. Phase-1 and timing entries are
/// NaN for the baseline.
inline MetricRow trial_metrics(const TrialRecord& r) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  MetricRow row;
  row.fill(nan);
  if (r.phase1) {
    const auto& rates = r.phase1->node_rates;
    row[static_cast<std::size_t>(Metric::c1_min)] = policy_rate(rates, Phase1Policy::min);
    row[static_cast<std::size_t>(Metric::c1_median)] = policy_rate(rates, Phase1Policy::median);
    row[static_cast<std::size_t>(Metric::c1_max)] = policy_rate(rates, Phase1Policy::max);
  }
  row[static_cast<std::size_t>(Metric::c2_closed)] = r.phase2.c2_closed;
  row[static_cast<std::size_t>(Metric::c2_logdet)] = r.phase2.c2_logdet;
  row[static_cast<std::size_t>(Metric::c_baseline)] = r.phase2.baseline_rate;
  if (r.timing) {
    row[static_cast<std::size_t>(Metric::t2)] = r.timing->t2;
    row[static_cast<std::size_t>(Metric::gain_ratio)] = r.timing->gain_ratio;
  }
  return row;
}

struct MetricSummary {
  double mean = 0.0;
  double se = 0.0;
  double p05 = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
};

/// Linear interpolation between order statistics of a sorted sample.
inline double percentile_sorted(std::span<const double> sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Mean, standard error (sample std / sqrt(n)) and 5/50/95th percentiles.
/// Any NaN in the sample makes every field NaN.
inline MetricSummary summarize(std::span<const double> values) {
  if (values.empty()) throw DomainError("summarize needs at least one value");
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  if (std::any_of(values.begin(), values.end(), [](double v) { return std::isnan(v); })) {
    return {nan, nan, nan, nan, nan};
  }
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double se = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return {mean, se, percentile_sorted(sorted, 0.05), percentile_sorted(sorted, 0.50),
          percentile_sorted(sorted, 0.95)};
}

/// A ratio of sample means with its delta-method standard error.
struct RatioSummary {
  double value = 0.0;
  double se = 0.0;
};

namespace detail {

inline double sample_mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_cov(std::span<const double> a, double ma, std::span<const double> b, double mb) {
  if (a.size() < 2) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
  return s / static_cast<double>(a.size() - 1);
}

}  // namespace detail

/// mean(num) / mean(den).
inline RatioSummary ratio_of_means(std::span<const double> num, std::span<const double> den) {
  if (num.empty() || num.size() != den.size()) throw DimensionError("ratio_of_means: sample sizes differ");
  const double mx = detail::sample_mean(num);
  const double my = detail::sample_mean(den);
  const double r = mx / my;
  const double var = detail::sample_cov(num, mx, num, mx) - 2.0 * r * detail::sample_cov(num, mx, den, my) +
                     r * r * detail::sample_cov(den, my, den, my);
  const double n = static_cast<double>(num.size());
  return {r, std::sqrt(std::max(var, 0.0) / n) / std::abs(my)};
}

/// Time-corrected two-slot gain evaluated at the mean capacities:
/// c1 / (c_b * (1 + c1 / c2)). t1 cancels.
inline RatioSummary combined_gain_of_means(std::span<const double> c1, std::span<const double> c2,
                                           std::span<const double> cb) {
  if (c1.empty() || c1.size() != c2.size() || c1.size() != cb.size()) {
    throw DimensionError("combined_gain_of_means: sample sizes differ");
  }
  const double m1 = detail::sample_mean(c1);
  const double m2 = detail::sample_mean(c2);
  const double mb = detail::sample_mean(cb);
  const double g = m1 * m2 / (mb * (m1 + m2));
  const double denom = mb * (m1 + m2) * (m1 + m2);
  const std::array<double, 3> grad = {m2 * m2 / denom, m1 * m1 / denom, -g / mb};
  const std::array<std::span<const double>, 3> xs = {c1, c2, cb};
  const std::array<double, 3> ms = {m1, m2, mb};
  double var = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) var += grad[i] * grad[j] * detail::sample_cov(xs[i], ms[i], xs[j], ms[j]);
  }
  return {g, std::sqrt(std::max(var, 0.0) / static_cast<double>(c1.size()))};
}

enum class SweepAxis { radius, nodes, d_bs_ue, p_node };

inline std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::radius: return "R";
    case SweepAxis::nodes: return "U";
    case SweepAxis::d_bs_ue: return "d_bs_ue";
    case SweepAxis::p_node: return "p_node";
  }
  return "?";
}

inline SweepAxis parse_axis(std::string_view name) {
  if (name == "R") return SweepAxis::radius;
  if (name == "U") return SweepAxis::nodes;
  if (name == "d_bs_ue") return SweepAxis::d_bs_ue;
  if (name == "p_node") return SweepAxis::p_node;
  throw ConfigError("axis", "unknown sweep axis '" + std::string(name) + "' (expected R, U, d_bs_ue or p_node)");
}

inline ScenarioConfig apply_axis(ScenarioConfig cfg, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::radius: cfg.radius_m = value; break;
    case SweepAxis::d_bs_ue: cfg.d_bs_ue_m = value; break;
    case SweepAxis::p_node: cfg.p_node_dbm = value; break;
    case SweepAxis::nodes:
      if (!(value >= 0.0) || value != std::floor(value) || value > 1e6) {
        throw ConfigError("values", "node counts must be non-negative integers");
      }
      cfg.nodes = static_cast<int>(value);
      break;
  }
  cfg.validate();
  return cfg;
}

struct SweepPoint {
  double axis_value = 0.0;
  std::size_t trials = 0;
  std::array<MetricSummary, kMetricCount> metrics{};
  RatioSummary rel_gain_phase2;    // mean reported C2 / mean C_B
  RatioSummary rel_gain_combined;  // two-slot gain at the mean capacities
  long long zf_resamples = 0;
  long long clamped_links = 0;

  const MetricSummary& operator[](Metric m) const { return metrics[static_cast<std::size_t>(m)]; }
};

struct SweepTable {
  SweepAxis axis = SweepAxis::radius;
  std::vector<SweepPoint> points;
};

/// Per-trial values a sweep point is aggregated from.
struct TrialSample {
  MetricRow metrics{};
  double c1_policy = 0.0;  // b/s/Hz under the configured policy
  double c2_reported = 0.0;
  TrialDiagnostics diagnostics;
};

inline TrialSample sample_trial(const ScenarioConfig& cfg, std::uint64_t master_seed, std::uint64_t index) {
  const TrialRecord r = run_trial(cfg, master_seed, index);
  TrialSample s{trial_metrics(r), std::numeric_limits<double>::quiet_NaN(), r.phase2.rate, r.diagnostics};
  if (r.phase1) s.c1_policy = r.phase1->rate;
  return s;
}

/// Runs trials 0..n-1 on up to `workers` threads; results are ordered by
/// trial index regardless of completion order.
inline std::vector<TrialSample> run_trials(const ScenarioConfig& cfg, std::size_t trials,
                                           std::uint64_t master_seed, unsigned workers = 1) {
  std::vector<TrialSample> out(trials);
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(trials, 1))));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < trials; i = next++) {
      try {
        out[i] = sample_trial(cfg, master_seed, i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = trials;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline SweepPoint aggregate(double axis_value, std::span<const TrialSample> samples) {
  if (samples.empty()) throw DomainError("aggregate needs at least one trial");
  SweepPoint p;
  p.axis_value = axis_value;
  p.trials = samples.size();
  std::vector<double> column(samples.size());
  for (std::size_t m = 0; m < kMetricCount; ++m) {
    for (std::size_t i = 0; i < samples.size(); ++i) column[i] = samples[i].metrics[m];
    p.metrics[m] = summarize(column);
  }
  std::vector<double> c1(samples.size()), c2(samples.size()), cb(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    c1[i] = samples[i].c1_policy;
    c2[i] = samples[i].c2_reported;
    cb[i] = samples[i].metrics[static_cast<std::size_t>(Metric::c_baseline)];
    p.zf_resamples += samples[i].diagnostics.zf_resamples;
    p.clamped_links += samples[i].diagnostics.clamped_links;
  }
  p.rel_gain_phase2 = ratio_of_means(c2, cb);
  if (std::any_of(c1.begin(), c1.end(), [](double v) { return std::isnan(v); })) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    p.rel_gain_combined = {nan, nan};
  } else {
    p.rel_gain_combined = combined_gain_of_means(c1, c2, cb);
  }
  return p;
}

/// Same master seed at every point, so points share random numbers.
inline SweepTable run_sweep(const ScenarioConfig& cfg, SweepAxis axis, std::span<const double> values,
                            std::size_t trials_per_point, std::uint64_t master_seed, unsigned workers = 1) {
  if (values.empty()) throw ConfigError("values", "sweep needs at least one value");
  if (trials_per_point < 1) throw ConfigError("trials", "trials per point must be >= 1");
  SweepTable table{axis, {}};
  table.points.reserve(values.size());
  for (double v : values) {
    const ScenarioConfig point_cfg = apply_axis(cfg, axis, v);
    const auto samples = run_trials(point_cfg, trials_per_point, master_seed, workers);
    table.points.push_back(aggregate(v, samples));
  }
  return table;
}

}  // namespace dmimo
