#include "cec/strategies.hpp"

#include "cec/clustering.hpp"
#include "cec/io.hpp"
#include "cec/neighborhood.hpp"
#include "cec/rng.hpp"
#include "cec/scoring.hpp"
#include "cec/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace cec {

void QueryRequest::validate() const {
  pool.validate();
  head.validate();
  if (pool.dim() != head.dim()) throw std::invalid_argument("pool/head dimension mismatch");
  const std::size_t n = static_cast<std::size_t>(pool.size());
  if (labeled_ids.size() + unlabeled_ids.size() != n) {
    throw std::invalid_argument("labeled and unlabeled ids must partition the pool");
  }
  std::vector<char> seen(n, 0);
  for (const auto* ids : {&labeled_ids, &unlabeled_ids}) {
    for (int id : *ids) {
      if (id < 0 || id >= static_cast<int>(n) || seen[static_cast<std::size_t>(id)]) {
        throw std::invalid_argument("labeled/unlabeled ids must be a disjoint cover of 0..n-1");
      }
      seen[static_cast<std::size_t>(id)] = 1;
    }
  }
  if (budget < 1) throw std::invalid_argument("budget must be >= 1");
  if (budget > static_cast<int>(unlabeled_ids.size())) {
    throw std::invalid_argument("budget " + std::to_string(budget) + " exceeds unlabeled pool size " +
                                std::to_string(unlabeled_ids.size()));
  }
  if (params.top_n < 1) throw std::invalid_argument("top_n must be >= 1");
  if (params.knn_k < 1) throw std::invalid_argument("knn_k must be >= 1");
  if (!(params.alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
}

namespace {

// Combined uncertainty U over the unlabeled sub-pool (rows normalized).
UncertaintyReport unlabeled_uncertainty(const EmbeddingPool& unlabeled_norm, const ClassHead& head,
                                        const StrategyParams& params) {
  const int n = static_cast<int>(unlabeled_norm.size());
  const int top_n = std::min(params.top_n, n);
  Vector self = calibrated_entropy(unlabeled_norm, head, top_n);
  const int k = std::min(params.knn_k, n - 1);
  Vector nn;
  if (k >= 1) {
    nn = neighbor_uncertainty(knn(unlabeled_norm, k), self, params.alpha);
  } else {
    nn = Vector::Zero(n);  // single-sample pool has no neighbors
  }
  return combined_uncertainty(std::move(self), std::move(nn), k, params.alpha);
}

QuerySet cec_pipeline(const QueryRequest& req, bool weighted, bool pick_most_uncertain) {
  req.validate();
  const EmbeddingPool sub = normalize_rows(subset_pool(req.pool, req.unlabeled_ids));
  const UncertaintyReport report = unlabeled_uncertainty(sub, req.head, req.params);

  const Vector weights = weighted ? report.combined : Vector::Ones(sub.size());
  const ClusterResult clusters = weighted_kmeans(sub.vectors, weights, req.budget, req.seed);
  const std::vector<int> local = pick_most_uncertain
                                     ? select_cluster_most_uncertain(clusters, report.combined)
                                     : select_cluster_representatives(clusters, sub.vectors);

  QuerySet out;
  out.per_sample_scores.emplace();
  for (int idx : local) {
    out.selected.push_back(req.unlabeled_ids[static_cast<std::size_t>(idx)]);
    out.per_sample_scores->push_back(report.combined[idx]);
  }
  return out;
}

}  // namespace

QuerySet cec_query(const QueryRequest& req) { return cec_pipeline(req, true, false); }

QuerySet random_query(const QueryRequest& req) {
  req.validate();
  std::mt19937_64 rng(req.seed);
  std::vector<int> ids = req.unlabeled_ids;
  std::shuffle(ids.begin(), ids.end(), rng);
  ids.resize(static_cast<std::size_t>(req.budget));
  return {std::move(ids), std::nullopt};
}

QuerySet entropy_query(const QueryRequest& req) {
  req.validate();
  const EmbeddingPool sub = subset_pool(req.pool, req.unlabeled_ids);
  const Vector h = row_entropies(zero_shot_probs(sub, req.head));

  std::vector<int> order(req.unlabeled_ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + req.budget, order.end(),
                    [&](int a, int b) { return h[a] != h[b] ? h[a] > h[b] : a < b; });

  QuerySet out;
  out.per_sample_scores.emplace();
  for (int r = 0; r < req.budget; ++r) {
    const int local = order[static_cast<std::size_t>(r)];
    out.selected.push_back(req.unlabeled_ids[static_cast<std::size_t>(local)]);
    out.per_sample_scores->push_back(h[local]);
  }
  return out;
}

QuerySet coreset_query(const QueryRequest& req) {
  req.validate();
  if (req.labeled_ids.empty()) throw std::invalid_argument("coreset requires a non-empty labeled set");

  const Matrix z = normalize_matrix_rows(req.pool.vectors);
  const Eigen::Index m = static_cast<Eigen::Index>(req.unlabeled_ids.size());

  // min squared distance of each unlabeled point to the covered set
  Vector min_d2 = Vector::Constant(m, std::numeric_limits<double>::infinity());
  auto cover = [&](int covered_id) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const double d2 = (z.row(req.unlabeled_ids[static_cast<std::size_t>(i)]) - z.row(covered_id)).squaredNorm();
      if (d2 < min_d2[i]) min_d2[i] = d2;
    }
  };
  for (int id : req.labeled_ids) cover(id);

  std::vector<char> taken(static_cast<std::size_t>(m), 0);
  QuerySet out;
  out.per_sample_scores.emplace();
  for (int pick = 0; pick < req.budget; ++pick) {
    int best = -1;
    double best_d2 = -1.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      if (min_d2[i] > best_d2) {
        best_d2 = min_d2[i];
        best = static_cast<int>(i);
      }
    }
    taken[static_cast<std::size_t>(best)] = 1;
    const int global = req.unlabeled_ids[static_cast<std::size_t>(best)];
    out.selected.push_back(global);
    out.per_sample_scores->push_back(best_d2);
    cover(global);
  }
  return out;
}

QuerySet badge_query(const QueryRequest& req) {
  req.validate();
  const EmbeddingPool sub = normalize_rows(subset_pool(req.pool, req.unlabeled_ids));
  const Matrix p = zero_shot_probs(sub, req.head).probs;
  const Eigen::Index m = sub.size();
  const Eigen::Index k = p.cols();
  const Eigen::Index d = sub.dim();

  // gradient embedding g_x = (p_x - onehot(argmax p_x)) (x) z_x, flattened K*d
  Matrix g(m, k * d);
  for (Eigen::Index i = 0; i < m; ++i) {
    Eigen::Index pseudo = 0;
    p.row(i).maxCoeff(&pseudo);
    for (Eigen::Index c = 0; c < k; ++c) {
      const double coef = p(i, c) - (c == pseudo ? 1.0 : 0.0);
      g.block(i, c * d, 1, d) = coef * sub.vectors.row(i);
    }
  }

  std::mt19937_64 rng(req.seed);
  std::vector<char> taken(static_cast<std::size_t>(m), 0);
  auto pick_fallback = [&]() {
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!taken[static_cast<std::size_t>(i)]) return static_cast<int>(i);
    }
    return -1;
  };

  // k-means++ seeding with the origin in the covered set: the first pick is
  // proportional to ||g||^2, and zero-gradient points keep zero mass.
  Vector min_d2 = g.rowwise().squaredNorm();
  QuerySet out;
  out.per_sample_scores.emplace();
  for (int pick_index = 0; pick_index < req.budget; ++pick_index) {
    const double total = min_d2.sum();
    int pick = total > 0.0 ? weighted_pick(min_d2, total, rng) : pick_fallback();
    if (pick < 0 || taken[static_cast<std::size_t>(pick)]) pick = pick_fallback();
    taken[static_cast<std::size_t>(pick)] = 1;
    out.selected.push_back(req.unlabeled_ids[static_cast<std::size_t>(pick)]);
    out.per_sample_scores->push_back(g.row(pick).squaredNorm());
    min_d2 = min_d2.cwiseMin((g.rowwise() - g.row(pick)).rowwise().squaredNorm());
    min_d2[pick] = 0.0;
  }
  return out;
}

Strategy parse_strategy(const std::string& name) {
  for (std::size_t i = 0; i < strategy_names().size(); ++i) {
    if (strategy_names()[i] == name) return static_cast<Strategy>(i);
  }
  throw ConfigError("unknown strategy '" + name + "'");
}

std::string strategy_name(Strategy s) { return strategy_names()[static_cast<std::size_t>(s)]; }

const std::vector<std::string>& strategy_names() {
  static const std::vector<std::string> names = {"random",    "entropy",    "coreset",       "badge",
                                                 "cec",       "cec-greedy", "cec-unweighted"};
  return names;
}

QuerySet run_strategy(Strategy strategy, const QueryRequest& req) {
  switch (strategy) {
    case Strategy::random: return random_query(req);
    case Strategy::entropy: return entropy_query(req);
    case Strategy::coreset: return coreset_query(req);
    case Strategy::badge: return badge_query(req);
    case Strategy::cec: return cec_query(req);
    case Strategy::cec_greedy: return cec_pipeline(req, false, true);
    case Strategy::cec_unweighted: return cec_pipeline(req, false, false);
  }
  throw std::logic_error("unhandled strategy");
}

QuerySet round_one_policy(Strategy strategy, const QueryRequest& req) {
  if (req.labeled_ids.empty() && strategy == Strategy::coreset) return random_query(req);
  return run_strategy(strategy, req);
}

}  // namespace cec
