#pragma once

#include <cmath>
#include <cstdint>

namespace noma {

/// Splittable counter-based generator (splitmix64 core). Substreams derived
/// from a (seed, stream) pair are statistically independent, so per-trial
/// draws can run in any order and still reproduce bit-identically.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  /// Independent substream for (seed, stream). Used to give every Monte
  /// Carlo trial its own generator.
  static Rng substream(std::uint64_t seed, std::uint64_t stream) {
    Rng r(mix(seed) ^ mix(stream * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL));
    r.next_u64();
    return r;
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Uniform double in [0, 1), 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Exp(1) draw; equals |g|^2 for g complex-normal with unit mean power.
  /// Strictly positive so drawn channel gains never collapse to zero.
  double exponential() {
    double e;
    do {
      e = -std::log1p(-uniform01());
    } while (!(e > 0.0));
    return e;
  }

  /// Integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace noma
