#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace dmimo {

/// Independent draws for one purpose inside one trial.
enum class StreamPurpose : std::uint64_t {
  placement = 0x706c6163656d656eULL,
  phase1_fading = 0x7068617365312d66ULL,
  phase2_fading = 0x7068617365322d66ULL,
  shadowing = 0x736861646f77696eULL,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix64(splitmix64(a) ^ (b + 0x632be59bd9b4e019ULL + (a << 6) + (a >> 2)));
}

/// Seeded random stream. Copyable; copies continue the same sequence.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  /// Stream for trial `trial_index` under `master_seed`.
  static RandomStream for_trial(std::uint64_t master_seed, std::uint64_t trial_index) {
    return RandomStream(hash_combine(master_seed, trial_index));
  }

  /// Substream derived from this stream's seed, independent of how much of
  /// this stream has been consumed.
  RandomStream substream(StreamPurpose purpose) const {
    return RandomStream(hash_combine(seed_, static_cast<std::uint64_t>(purpose)));
  }

  std::uint64_t seed() const noexcept { return seed_; }

  /// Uniform on [0, 1).
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

  /// Circularly-symmetric CN(0, 1).
  std::complex<double> complex_normal() {
    constexpr double kHalf = 0.70710678118654752440;
    const double re = normal();
    const double im = normal();
    return {re * kHalf, im * kHalf};
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace dmimo
