#pragma once

#include "cec/types.hpp"

namespace cec {

// Exact k-nearest-neighbor table. Distances are squared L2 on unit vectors,
// so every entry lies in [0, 4]; each row is sorted by nondecreasing
// distance and never contains the query itself.
struct NeighborGraph {
  IntMatrix neighbor_ids;  // n x k
  Matrix sq_dists;         // n x k

  Eigen::Index size() const { return neighbor_ids.rows(); }
  int k() const { return static_cast<int>(neighbor_ids.cols()); }
};

// Brute-force exact kNN over row-normalized embeddings (squared distance via
// 2 - 2*dot, evaluated in row blocks). Ties broken by lower sample index.
// Requires 1 <= k < n.
NeighborGraph knn(const EmbeddingPool& pool, int k);

// H_NN(x) = (1/k) * sum over neighbors of exp(-alpha * ||z - z_i||^2) * H(x_i).
Vector neighbor_uncertainty(const NeighborGraph& graph, const Vector& self_entropy, double alpha);

// Self entropy, neighbor uncertainty, and their elementwise sum U.
struct UncertaintyReport {
  Vector self_entropy;
  Vector neighbor_uncertainty;
  Vector combined;
  int k = 0;
  double alpha = 0.0;
};

UncertaintyReport combined_uncertainty(Vector self_entropy, Vector neighbor, int k, double alpha);

}  // namespace cec
