#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace birddet {

std::uint64_t splitmix64(std::uint64_t x);

// Counter-based seed derivation. Every task in a fan-out (EM restart,
// evaluation repetition, subsample draw) gets derive_seed(master, counter)
// with a fixed counter, so execution order and thread count never change
// results.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter);

// Seeded generator with fixed, implementation-independent distributions.
// std::uniform_real_distribution and friends are allowed to differ between
// standard libraries; these are pinned so seeded runs reproduce everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller, one value cached.
  double normal();

  // Unbiased integer in [0, n), Lemire's method.
  std::size_t uniform_index(std::size_t n);

  // First k entries of a seeded partial Fisher-Yates shuffle of 0..n-1.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 gen_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace birddet
