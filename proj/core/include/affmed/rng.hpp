#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

// Seeding and sampling helpers. The standard <random> distributions are
// implementation-defined, so every transform from raw engine output to a
// sample is written out here; with a fixed seed the byte stream of samples
// is reproducible across platforms and standard libraries.
namespace affmed {

// SplitMix64 finalizer (Steele, Lea, Flood 2014). Used both as a seed mixer
// and to bootstrap engine state.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed and an index path.
// split(s, a) != split(s, b) for a != b with overwhelming probability, and
// nested splits give per-(grid, trial, use) streams.
inline std::uint64_t split_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(base ^ splitmix64(index + 0x6A09E667F3BCC909ull));
}

inline std::uint64_t split_seed(std::uint64_t base, std::uint64_t i, std::uint64_t j) {
  return split_seed(split_seed(base, i), j);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller; one value per call, no cached state so
  // the draw count stays predictable.
  double normal() {
    double u = uniform01();
    double v = uniform01();
    // Guard against log(0).
    if (u <= 0.0) u = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925286766559 * v);
  }

  // +s or -s with equal probability.
  double rademacher(double s) { return (engine_() >> 63) ? s : -s; }

  // Uniform integer in [0, n) by rejection; exact for any n.
  std::uint64_t bounded(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Fisher-Yates shuffle of [0, n) indices.
  std::vector<int> permutation(int n) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(bounded(static_cast<std::uint64_t>(i) + 1));
      std::swap(p[i], p[j]);
    }
    return p;
  }

  // First m entries of a random permutation: m distinct indices in [0, n).
  std::vector<int> sample_without_replacement(int n, int m) {
    std::vector<int> p = permutation(n);
    p.resize(m);
    return p;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace affmed
