#include "cec/clustering.hpp"

#include "cec/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace cec {

namespace {

Vector floor_weights(const Vector& weights, Eigen::Index n) {
  if (weights.size() != n) throw std::invalid_argument("weight vector length does not match point count");
  Vector floored(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = weights[i];
    if (!std::isfinite(w) || w < 0.0) throw std::invalid_argument("weights must be finite and nonnegative");
    floored[i] = std::max(w, kWeightFloor);
  }
  return floored;
}

// Squared distances of every point to every centroid, n x b.
Matrix point_centroid_sq_dists(const Matrix& points, const Matrix& centroids) {
  Matrix d2 = -2.0 * (points * centroids.transpose());
  const Vector point_sq = points.rowwise().squaredNorm();
  const Vector centroid_sq = centroids.rowwise().squaredNorm();
  d2.colwise() += point_sq;
  d2.rowwise() += centroid_sq.transpose();
  return d2.cwiseMax(0.0);
}

// Nearest centroid per point, ties resolved toward the lower cluster id.
void assign_points(const Matrix& d2, std::vector<int>& assignment) {
  const Eigen::Index n = d2.rows();
  const Eigen::Index b = d2.cols();
  assignment.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    int best = 0;
    double best_d = d2(i, 0);
    for (Eigen::Index c = 1; c < b; ++c) {
      if (d2(i, c) < best_d) {
        best_d = d2(i, c);
        best = static_cast<int>(c);
      }
    }
    assignment[static_cast<std::size_t>(i)] = best;
  }
}

}  // namespace

std::vector<int> weighted_kmeanspp_indices(const Matrix& points, const Vector& weights, int b,
                                           std::uint64_t seed) {
  const Eigen::Index n = points.rows();
  if (b < 1) throw std::invalid_argument("b must be >= 1");
  if (b > n) throw std::invalid_argument("b=" + std::to_string(b) + " exceeds point count " + std::to_string(n));
  const Vector w = floor_weights(weights, n);
  std::mt19937_64 rng(seed);

  std::vector<int> chosen;
  chosen.reserve(static_cast<std::size_t>(b));
  std::vector<char> taken(static_cast<std::size_t>(n), 0);

  auto pick_fallback = [&]() {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!taken[static_cast<std::size_t>(i)]) return static_cast<int>(i);
    }
    return -1;
  };

  int first = weighted_pick(w, w.sum(), rng);
  if (first < 0) first = pick_fallback();
  chosen.push_back(first);
  taken[static_cast<std::size_t>(first)] = 1;

  Vector min_d2 = (points.rowwise() - points.row(first)).rowwise().squaredNorm();
  Vector mass(n);
  for (int c = 1; c < b; ++c) {
    mass = w.cwiseProduct(min_d2);
    const double total = mass.sum();
    int pick = total > 0.0 ? weighted_pick(mass, total, rng) : pick_fallback();
    if (pick < 0 || taken[static_cast<std::size_t>(pick)]) pick = pick_fallback();
    chosen.push_back(pick);
    taken[static_cast<std::size_t>(pick)] = 1;
    min_d2 = min_d2.cwiseMin((points.rowwise() - points.row(pick)).rowwise().squaredNorm());
  }
  return chosen;
}

ClusterResult weighted_lloyd(const Matrix& points, const Vector& weights, Matrix init_centroids) {
  const Eigen::Index n = points.rows();
  const Eigen::Index b = init_centroids.rows();
  if (b < 1 || b > n) throw std::invalid_argument("centroid count must be in [1, n]");
  if (init_centroids.cols() != points.cols()) throw std::invalid_argument("centroid dimension mismatch");

  ClusterResult result;
  result.weights_used = floor_weights(weights, n);
  result.centroids = std::move(init_centroids);
  const Vector& w = result.weights_used;

  double prev_objective = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= kKMeansMaxIters; ++iter) {
    const Matrix d2 = point_centroid_sq_dists(points, result.centroids);
    assign_points(d2, result.assignment);

    double objective = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) objective += w[i] * d2(i, result.assignment[static_cast<std::size_t>(i)]);
    if (objective > prev_objective * (1.0 + 1e-9) + 1e-9) {
      throw std::logic_error("weighted k-means objective increased between iterations");
    }
    result.objective_trace.push_back(objective);
    prev_objective = objective;
    result.iterations = iter;

    // weighted mean update; clusters are accumulated in point-index order
    Matrix sums = Matrix::Zero(b, points.cols());
    Vector mass = Vector::Zero(b);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = result.assignment[static_cast<std::size_t>(i)];
      sums.row(c) += w[i] * points.row(i);
      mass[c] += w[i];
    }
    Matrix updated(b, points.cols());
    std::vector<int> empty_clusters;
    for (Eigen::Index c = 0; c < b; ++c) {
      if (mass[c] > 0.0) {
        updated.row(c) = sums.row(c) / mass[c];
      } else {
        updated.row(c) = result.centroids.row(c);
        empty_clusters.push_back(static_cast<int>(c));
      }
    }

    if (!empty_clusters.empty()) {
      // move each empty centroid onto the point with the largest weighted
      // distance to its current centroid; duplicates fall back to stealing a
      // point from a multi-member cluster
      std::vector<char> reseeded(static_cast<std::size_t>(n), 0);
      std::vector<int> member_count(static_cast<std::size_t>(b), 0);
      for (int a : result.assignment) ++member_count[static_cast<std::size_t>(a)];
      for (int c : empty_clusters) {
        int best = -1;
        double best_score = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          if (reseeded[static_cast<std::size_t>(i)]) continue;
          const double score = w[i] * d2(i, result.assignment[static_cast<std::size_t>(i)]);
          if (score > best_score) {
            best_score = score;
            best = static_cast<int>(i);
          }
        }
        if (best < 0 || best_score <= 0.0) {
          for (Eigen::Index i = 0; i < n; ++i) {
            const int owner = result.assignment[static_cast<std::size_t>(i)];
            if (!reseeded[static_cast<std::size_t>(i)] && member_count[static_cast<std::size_t>(owner)] > 1) {
              best = static_cast<int>(i);
              break;
            }
          }
        }
        if (best < 0) throw std::invalid_argument("cannot fill empty cluster: fewer distinct points than clusters");
        reseeded[static_cast<std::size_t>(best)] = 1;
        const int previous_owner = result.assignment[static_cast<std::size_t>(best)];
        --member_count[static_cast<std::size_t>(previous_owner)];
        ++member_count[static_cast<std::size_t>(c)];
        updated.row(c) = points.row(best);
      }
    }

    const double base = result.centroids.norm();
    const double shift = (updated - result.centroids).norm() / std::max(base, 1e-30);
    result.centroids = std::move(updated);
    if (empty_clusters.empty() && shift < kCentroidShiftTol) {
      result.converged = true;
      break;
    }
  }

  // final assignment consistent with the returned centroids
  {
    const Matrix d2 = point_centroid_sq_dists(points, result.centroids);
    assign_points(d2, result.assignment);
    std::vector<int> member_count(static_cast<std::size_t>(b), 0);
    for (int a : result.assignment) ++member_count[static_cast<std::size_t>(a)];
    for (Eigen::Index c = 0; c < b; ++c) {
      if (member_count[static_cast<std::size_t>(c)] > 0) continue;
      // convergence left this centroid without members; claim the farthest
      // point (or one from a crowded cluster) so every cluster is non-empty
      int best = -1;
      double best_score = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const int owner = result.assignment[static_cast<std::size_t>(i)];
        if (member_count[static_cast<std::size_t>(owner)] <= 1) continue;
        const double score = w[i] * d2(i, owner);
        if (score > best_score) {
          best_score = score;
          best = static_cast<int>(i);
        }
      }
      if (best < 0) throw std::invalid_argument("cannot fill empty cluster: fewer distinct points than clusters");
      --member_count[result.assignment[static_cast<std::size_t>(best)]];
      ++member_count[static_cast<std::size_t>(c)];
      result.assignment[static_cast<std::size_t>(best)] = static_cast<int>(c);
      result.centroids.row(c) = points.row(best);
    }
  }
  return result;
}

ClusterResult weighted_kmeans(const Matrix& points, const Vector& weights, int b, std::uint64_t seed) {
  const std::vector<int> seeds = weighted_kmeanspp_indices(points, weights, b, seed);
  Matrix init(static_cast<Eigen::Index>(seeds.size()), points.cols());
  for (std::size_t c = 0; c < seeds.size(); ++c) init.row(static_cast<Eigen::Index>(c)) = points.row(seeds[c]);
  return weighted_lloyd(points, weights, std::move(init));
}

std::vector<int> select_cluster_representatives(const ClusterResult& result, const Matrix& points) {
  const Eigen::Index b = result.centroids.rows();
  std::vector<int> best(static_cast<std::size_t>(b), -1);
  std::vector<double> best_d(static_cast<std::size_t>(b), std::numeric_limits<double>::infinity());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const int c = result.assignment[static_cast<std::size_t>(i)];
    const double d = (points.row(i) - result.centroids.row(c)).squaredNorm();
    if (d < best_d[static_cast<std::size_t>(c)]) {
      best_d[static_cast<std::size_t>(c)] = d;
      best[static_cast<std::size_t>(c)] = static_cast<int>(i);
    }
  }
  for (int idx : best) {
    if (idx < 0) throw std::logic_error("empty cluster in final clustering result");
  }
  return best;
}

std::vector<int> select_cluster_most_uncertain(const ClusterResult& result, const Vector& scores) {
  if (scores.size() != static_cast<Eigen::Index>(result.assignment.size())) {
    throw std::invalid_argument("score vector length does not match assignment");
  }
  const Eigen::Index b = result.centroids.rows();
  std::vector<int> best(static_cast<std::size_t>(b), -1);
  std::vector<double> best_score(static_cast<std::size_t>(b), -std::numeric_limits<double>::infinity());
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    const int c = result.assignment[static_cast<std::size_t>(i)];
    if (scores[i] > best_score[static_cast<std::size_t>(c)]) {
      best_score[static_cast<std::size_t>(c)] = scores[i];
      best[static_cast<std::size_t>(c)] = static_cast<int>(i);
    }
  }
  for (int idx : best) {
    if (idx < 0) throw std::logic_error("empty cluster in final clustering result");
  }
  return best;
}

}  // namespace cec
