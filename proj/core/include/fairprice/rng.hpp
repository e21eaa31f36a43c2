#pragma once

#include <cstdint>
#include <random>

namespace fairprice {

/// Stream identifiers; every consumer of randomness gets its own stream.
enum class Stream : std::uint64_t { environment = 1, agent = 2, instance = 3 };

/// splitmix64 finalizer, used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// mt19937_64 with a portable uniform double (std distributions are
/// implementation defined, which would break cross-platform replay).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, Stream stream) : engine_(mix_seed(seed, static_cast<std::uint64_t>(stream))) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }
  std::uint64_t next() { return engine_(); }

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  std::mt19937_64 engine_;
};

}  // namespace fairprice
