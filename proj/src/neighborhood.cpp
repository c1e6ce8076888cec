#include "cec/neighborhood.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace cec {

NeighborGraph knn(const EmbeddingPool& pool, int k) {
  const Eigen::Index n = pool.size();
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (k >= n) {
    throw std::invalid_argument("k=" + std::to_string(k) + " must be smaller than pool size " + std::to_string(n));
  }

  NeighborGraph graph;
  graph.neighbor_ids.resize(n, k);
  graph.sq_dists.resize(n, k);

  // Cap the similarity block at ~32 MB so n x n never materializes.
  const Eigen::Index block = std::clamp<Eigen::Index>(Eigen::Index(4'000'000) / std::max<Eigen::Index>(n, 1), 16, n);

  std::vector<std::pair<double, int>> candidates(static_cast<std::size_t>(n - 1));
  for (Eigen::Index start = 0; start < n; start += block) {
    const Eigen::Index rows = std::min(block, n - start);
    const Matrix sims = pool.vectors.middleRows(start, rows) * pool.vectors.transpose();
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Eigen::Index query = start + r;
      std::size_t filled = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == query) continue;
        const double d2 = std::clamp(2.0 - 2.0 * sims(r, j), 0.0, 4.0);
        candidates[filled++] = {d2, static_cast<int>(j)};
      }
      std::partial_sort(candidates.begin(), candidates.begin() + k, candidates.end());
      for (int c = 0; c < k; ++c) {
        graph.sq_dists(query, c) = candidates[static_cast<std::size_t>(c)].first;
        graph.neighbor_ids(query, c) = candidates[static_cast<std::size_t>(c)].second;
      }
    }
  }
  return graph;
}

Vector neighbor_uncertainty(const NeighborGraph& graph, const Vector& self_entropy, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (self_entropy.size() != graph.size()) {
    throw std::invalid_argument("entropy vector length " + std::to_string(self_entropy.size()) +
                                " does not match graph size " + std::to_string(graph.size()));
  }
  const int k = graph.k();
  Vector h_nn(graph.size());
  for (Eigen::Index i = 0; i < graph.size(); ++i) {
    double acc = 0.0;
    for (int c = 0; c < k; ++c) {
      acc += std::exp(-alpha * graph.sq_dists(i, c)) * self_entropy[graph.neighbor_ids(i, c)];
    }
    h_nn[i] = acc / k;
  }
  return h_nn;
}

UncertaintyReport combined_uncertainty(Vector self_entropy, Vector neighbor, int k, double alpha) {
  if (self_entropy.size() != neighbor.size()) {
    throw std::invalid_argument("uncertainty vectors differ in length: " + std::to_string(self_entropy.size()) +
                                " vs " + std::to_string(neighbor.size()));
  }
  UncertaintyReport report;
  report.combined = self_entropy + neighbor;
  report.self_entropy = std::move(self_entropy);
  report.neighbor_uncertainty = std::move(neighbor);
  report.k = k;
  report.alpha = alpha;
  return report;
}

}  // namespace cec
