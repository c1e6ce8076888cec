#pragma once

#include "cec/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cec {

struct StrategyParams {
  int top_n = 10;     // samples per class for the contextualized prior
  int knn_k = 10;     // neighbor count; clamped to |unlabeled|-1 on small pools
  double alpha = 0.1; // neighbor kernel bandwidth
};

struct QueryRequest {
  EmbeddingPool pool;
  ClassHead head;
  std::vector<int> labeled_ids;
  std::vector<int> unlabeled_ids;
  int budget = 0;
  StrategyParams params;
  std::uint64_t seed = 0;

  void validate() const;
};

// Batch of selected unlabeled ids plus, when the strategy has one, the score
// it assigned to each selected sample (combined uncertainty for cec variants,
// raw entropy for entropy, coverage distance for coreset, gradient norm
// squared for badge).
struct QuerySet {
  std::vector<int> selected;
  std::optional<std::vector<double>> per_sample_scores;
};

enum class Strategy { random, entropy, coreset, badge, cec, cec_greedy, cec_unweighted };

Strategy parse_strategy(const std::string& name);
std::string strategy_name(Strategy s);
const std::vector<std::string>& strategy_names();

// Calibrated entropy -> neighbor uncertainty -> combined score U ->
// U-weighted k-means with `budget` clusters -> closest sample per centroid.
// Needs no labeled data.
QuerySet cec_query(const QueryRequest& req);

// Uniform sample without replacement from the unlabeled ids.
QuerySet random_query(const QueryRequest& req);

// Top-budget by raw (uncalibrated) predictive entropy; ties by lower index.
QuerySet entropy_query(const QueryRequest& req);

// k-center greedy: repeatedly take the unlabeled point farthest from the
// covered set (labeled plus already selected). Requires labeled seeds.
QuerySet coreset_query(const QueryRequest& req);

// k-means++ seeding over gradient embeddings (p - onehot(argmax p)) (x) z.
QuerySet badge_query(const QueryRequest& req);

QuerySet run_strategy(Strategy strategy, const QueryRequest& req);

// First-round fallback: strategies that need labeled seeds degrade to random
// sampling when the labeled set is empty; the rest run natively.
QuerySet round_one_policy(Strategy strategy, const QueryRequest& req);

}  // namespace cec
