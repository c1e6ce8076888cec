#pragma once

#include "cec/types.hpp"

#include <cstdint>
#include <vector>

namespace cec {

inline constexpr double kWeightFloor = 1e-12;
inline constexpr double kCentroidShiftTol = 1e-4;
inline constexpr int kKMeansMaxIters = 100;

struct ClusterResult {
  Matrix centroids;             // b x d
  std::vector<int> assignment;  // n entries in [0, b)
  Vector weights_used;          // floored weights, n entries
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;  // weighted objective after each assignment step
};

// Weighted k-means++ seeding: first center drawn with probability
// proportional to weight, later centers proportional to weight times squared
// distance to the nearest chosen center. Returns b distinct point indices.
std::vector<int> weighted_kmeanspp_indices(const Matrix& points, const Vector& weights, int b,
                                           std::uint64_t seed);

// Weighted Lloyd iterations from explicit initial centroids. Centroids are
// weighted means; empty clusters are reseeded to the point with the largest
// weighted distance to its centroid. Stops when the relative Frobenius
// centroid shift drops below kCentroidShiftTol or after kKMeansMaxIters.
ClusterResult weighted_lloyd(const Matrix& points, const Vector& weights, Matrix init_centroids);

// k-means++ seeding followed by weighted Lloyd. Zero weights are floored to
// kWeightFloor so every point stays assignable.
ClusterResult weighted_kmeans(const Matrix& points, const Vector& weights, int b, std::uint64_t seed);

// Per cluster, the member with minimum L2 distance to the centroid; ties by
// lower index. One index per cluster, ordered by cluster id.
std::vector<int> select_cluster_representatives(const ClusterResult& result, const Matrix& points);

// Per cluster, the member with the highest score; ties by lower index.
std::vector<int> select_cluster_most_uncertain(const ClusterResult& result, const Vector& scores);

}  // namespace cec
