#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace netspill {

using Seed = std::uint64_t;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Child seed for stream `index` of `master`:
///   splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019)).
/// Realization r of an ensemble uses derive_seed(master_seed, r).
constexpr Seed derive_seed(Seed master, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

// Named sub-streams of a realization seed.
inline constexpr std::uint64_t kSeedNodeStream = 0x5EED;
inline constexpr std::uint64_t kCouplingStream = 0xC0C0;

/// mt19937_64 with portable variate generation. The standard distributions
/// are implementation-defined, so draws are produced here from raw engine
/// output to keep results identical across standard libraries.
class Rng {
 public:
  explicit Rng(Seed seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer on [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x < threshold);
    return x % n;
  }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Number of failures before the first success of a Bernoulli(p) sequence, 0 < p < 1.
  std::uint64_t geometric(double p) {
    const double u = 1.0 - uniform();  // (0, 1]
    const double k = std::floor(std::log(u) / std::log1p(-p));
    return k >= 1.8e19 ? UINT64_MAX : static_cast<std::uint64_t>(k);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace netspill
