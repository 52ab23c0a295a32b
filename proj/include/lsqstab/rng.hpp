#pragma once

#include <cstdint>
#include <random>

namespace lsqstab {

/// Default seed used whenever a caller does not provide one. Never time-based.
inline constexpr std::uint64_t kDefaultSeed = 42;

/// SplitMix64 finalizer; used to expand user seeds into well-mixed generator states.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Per-trial seed: base seed xor trial index. Trials are therefore independent of
/// execution order and can be fanned out freely.
constexpr std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial) noexcept {
  return base ^ trial;
}

/// Derives an independent sub-stream seed from a seed and a stream tag
/// (e.g. separate streams for sample points and for observation noise).
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
  return splitmix64(seed ^ splitmix64(tag + 0x5851f42d4c957f2dULL));
}

/// Seedable generator owned by a single trial. Wraps mt19937_64; the seed is
/// passed through splitmix64 so that adjacent integer seeds give unrelated streams.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t seed() const noexcept { return seed_; }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform double in [0,1) with 53 random bits; consumes exactly one engine output.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() { return normal_(engine_); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace lsqstab
