#pragma once

#include <cstdint>
#include <random>

namespace ovm {

/// Per-run random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. Bounded integers and uniform reals are derived here rather than
/// through <random> distributions, whose algorithms are implementation
/// defined; a seed therefore reproduces the same run with any standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Exactly one draw regardless of p, so p = 0 and p = 1 consume the stream
  /// the same way as any other value.
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer: a bijection on 64-bit words with full avalanche.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the i-th independent replicate drawn from a parent seed.
constexpr std::uint64_t substream_seed(std::uint64_t parent, std::uint64_t i) {
  return splitmix64(parent ^ splitmix64(i + 0x632be59bd9b4e019ULL));
}

}  // namespace ovm
