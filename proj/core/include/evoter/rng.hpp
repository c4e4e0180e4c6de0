#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

namespace evoter {

/// Deterministic pseudo-random source used everywhere a decision is randomized.
///
/// Wraps splitmix64/xoshiro-style mixing instead of std::uniform_*_distribution
/// so that a (seed, call sequence) pair produces the same stream on every
/// platform and standard library. Run transcripts are compared byte-for-byte
/// in tests, which rules out implementation-defined distributions.
class RandomSource {
public:
  explicit RandomSource(std::uint64_t seed = 0) : state_(seed + 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    assert(bound > 0);
    // rejection sampling to stay exactly uniform
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % bound;
  }

  /// Uniform integer in [lo, hi] inclusive.
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    assert(lo <= hi);
    return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  bool chance(double p) { return uniform() < p; }

  /// Approximate standard normal (sum of 12 uniforms, mean-centered).
  /// Good enough for synthetic data generation; not for statistics.
  double gauss() {
    double s = 0.0;
    for (int i = 0; i < 12; ++i) s += uniform();
    return s - 6.0;
  }

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    assert(!items.empty());
    return items[below(items.size())];
  }

  /// Derive an independent child source; mixing keeps streams uncorrelated.
  RandomSource fork(std::uint64_t salt) {
    RandomSource child(next_u64() ^ (salt * 0xd6e8feb86659fd93ULL));
    return child;
  }

private:
  std::uint64_t state_;
};

/// Stateless mix of a base seed with a stream index, for parallel-safe seeding.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed ^ (stream + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace evoter
