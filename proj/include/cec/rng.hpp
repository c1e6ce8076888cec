#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace cec {

// splitmix64 round; derives independent stream seeds from (seed, stream id).
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9E3779B97F4A7C15ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Draws an index with probability proportional to weights[i]. `total` is the
// precomputed sum of weights and must be positive. Selection works on the
// cumulative sum, so scaling all weights by a common factor leaves the
// distribution unchanged.
inline int weighted_pick(const Eigen::Ref<const Eigen::VectorXd>& weights, double total,
                         std::mt19937_64& rng) {
  const double target = std::uniform_real_distribution<double>(0.0, 1.0)(rng) * total;
  double cum = 0.0;
  int last_positive = -1;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    if (w <= 0.0) continue;
    last_positive = static_cast<int>(i);
    cum += w;
    if (cum > target) return last_positive;
  }
  return last_positive;  // rounding pushed target past the final cumulative sum
}

}  // namespace cec
