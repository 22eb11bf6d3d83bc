#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace predlearn {

/// Seedable counter-based generator (SplitMix64).
///
/// The full specification, so that other implementations can reproduce
/// streams bit-for-bit from the same seed:
///   state_{k+1} = state_k + 0x9E3779B97F4A7C15
///   output(z):  z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
///               z ^= z >> 27; z *= 0x94D049BB133111EB;
///               z ^= z >> 31; return z
/// uniform64 returns output(state_{k+1}); uniform01 uses the top 53 bits
/// scaled by 2^-53; uniform_int uses rejection sampling on uniform64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t uniform64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(uniform64() >> 11) * 0x1.0p-53; }

  double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t uniform_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = uniform64();
    } while (x >= limit);
    return x % n;
  }

  /// Uniform integer in [lo, hi] inclusive.
  long long uniform_int(long long lo, long long hi) {
    if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
    return lo + static_cast<long long>(
                    uniform_below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  /// Index draw with probability proportional to weights (inverse CDF).
  std::size_t categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw std::invalid_argument("categorical: negative weight");
      total += w;
    }
    if (!(total > 0.0)) throw std::invalid_argument("categorical: zero total weight");
    double u = uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.size() - 1;
  }

 private:
  std::uint64_t state_;
};

/// FNV-1a over raw bytes; used for action digests and stream derivation.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 0xCBF29CE484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Digest of a double vector, for reproducibility audits of actions.
inline std::uint64_t digest_vector(std::span<const double> v) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (double x : v) h = fnv1a64(&x, sizeof(x), h);
  return h;
}

inline std::uint64_t digest_value(double x) { return digest_vector({&x, 1}); }

/// Per-stream seed: hash of (seed, stream index). Each experiment trial owns
/// the stream derive_seed(seed, trial).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t h = fnv1a64(&seed, sizeof(seed));
  h = fnv1a64(&stream, sizeof(stream), h);
  return h;
}

}  // namespace predlearn
