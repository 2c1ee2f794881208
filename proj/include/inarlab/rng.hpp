#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace inarlab {

/// splitmix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Seed of derived stream `stream` under master seed `master`:
/// mix64(master + (stream + 1) * 0x9E3779B97F4A7C15). Stream 0 is distinct
/// from the master itself, so a master stream and its children never collide.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return mix64(master + (stream + 1) * 0x9E3779B97F4A7C15ull);
}

/// Reproducible random stream: a std::mt19937_64 engine (bit-stable across
/// platforms by the standard) with all samplers implemented here, so draws
/// never depend on standard-library distribution internals. Single-owner;
/// parallel callers derive independent streams via split_seed.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Exact Binomial(trials, prob) draw by inverse-CDF walk on the smaller
  /// success probability; trial counts are split into chunks so the walk's
  /// starting pmf never underflows.
  int binomial(int trials, double prob) {
    if (trials <= 0) return 0;
    if (prob <= 0.0) return 0;
    if (prob >= 1.0) return trials;
    const bool flipped = prob > 0.5;
    const double q = flipped ? 1.0 - prob : prob;
    int successes = 0;
    int remaining = trials;
    while (remaining > kChunk) {
      successes += inverse_walk(kChunk, q);
      remaining -= kChunk;
    }
    successes += inverse_walk(remaining, q);
    return flipped ? trials - successes : successes;
  }

  std::uint64_t next_raw() { return engine_(); }

 private:
  // (1-q)^kChunk stays far above double underflow for q <= 1/2.
  static constexpr int kChunk = 1000;

  int inverse_walk(int m, double q) {
    const double u = uniform();
    double pmf = std::exp(static_cast<double>(m) * std::log1p(-q));
    double cdf = pmf;
    const double odds = q / (1.0 - q);
    int k = 0;
    while (u >= cdf && k < m) {
      pmf *= odds * static_cast<double>(m - k) / static_cast<double>(k + 1);
      ++k;
      cdf += pmf;
    }
    return k;
  }

  std::mt19937_64 engine_;
};

}  // namespace inarlab
