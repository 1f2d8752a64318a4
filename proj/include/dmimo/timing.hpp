#pragma once

#include <cmath>

#include "dmimo/errors.hpp"

namespace dmimo {

/// Two-slot accounting: phase 1 runs for t1, phase 2 for however long the
/// joint transmission needs to forward the same bits.
struct TimingResult {
  double t1 = 1.0;                      // s
  double t2 = 0.0;                      // s
  double dmimo_bits = 0.0;              // C1 * t1
  double dmimo_duration = 0.0;          // t1 + t2
  double baseline_bits_corrected = 0.0; // C_B * (t1 + t2)
  double gain_ratio = 0.0;              // dmimo_bits / baseline_bits_corrected

  /// Bits per second of total elapsed time.
  double dmimo_throughput() const { return dmimo_bits / dmimo_duration; }
};

inline double phase2_time(double c1, double c2, double t1) {
  if (!(c2 > 0.0)) throw UnreachableError("phase-2 capacity is zero, UE cannot be served");
  if (!(c1 >= 0.0)) throw DomainError("phase2_time: c1 must be >= 0");
  if (!(t1 > 0.0)) throw DomainError("phase2_time: t1 must be > 0");
  return c1 * t1 / c2;
}

inline TimingResult compare_to_baseline(double c1, double c2, double c_b, double t1) {
  if (!(c_b > 0.0)) throw UnreachableError("baseline capacity is zero");
  TimingResult out;
  out.t1 = t1;
  out.t2 = phase2_time(c1, c2, t1);
  out.dmimo_bits = c1 * t1;
  out.dmimo_duration = t1 + out.t2;
  out.baseline_bits_corrected = c_b * out.dmimo_duration;
  out.gain_ratio = out.dmimo_bits / out.baseline_bits_corrected;
  return out;
}

}  // namespace dmimo
