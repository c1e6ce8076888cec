#include "cec/driver.hpp"

#include "cec/io.hpp"
#include "cec/rng.hpp"
#include "cec/synthetic.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

namespace cec {

using ordered_json = nlohmann::ordered_json;

std::uint64_t round_seed(std::uint64_t run_seed, int round) {
  return mix_seed(run_seed, static_cast<std::uint64_t>(round));
}

std::uint64_t train_seed(std::uint64_t run_seed, int round) {
  return mix_seed(run_seed, 0x7F000000ull + static_cast<std::uint64_t>(round));
}

Dataset load_dataset(const ALConfig& cfg) {
  cfg.validate();
  Dataset data;
  if (cfg.uses_files()) {
    const FileFormat format = parse_format(cfg.data_format);
    data.train = load_pool(cfg.train_embeddings, format);
    data.test = load_pool(cfg.test_embeddings, format);
    data.head = load_head(cfg.class_head, format, cfg.temperature);
    if (!data.train.labels) throw DataError(cfg.train_embeddings + ": training pool has no labels for the oracle");
    if (!data.test.labels) throw DataError(cfg.test_embeddings + ": test pool has no labels for evaluation");
    for (const EmbeddingPool* pool : {&data.train, &data.test}) {
      if (pool->dim() != data.head.dim()) throw DataError("pool/head dimension mismatch");
      if (pool->num_classes.value_or(0) > static_cast<int>(data.head.num_classes())) {
        throw DataError("pool labels exceed head class count");
      }
    }
  } else {
    SyntheticSpec spec;
    spec.num_classes = cfg.synth_classes;
    spec.dim = cfg.synth_dim;
    spec.pool_size = cfg.synth_train + cfg.synth_test;
    spec.class_weights = cfg.synth_class_weights.empty()
                             ? std::vector<double>(static_cast<std::size_t>(cfg.synth_classes),
                                                   1.0 / cfg.synth_classes)
                             : normalize_weights(cfg.synth_class_weights);
    spec.cluster_spread = cfg.synth_spread;
    spec.outlier_fraction = cfg.synth_outlier_fraction;
    spec.seed = cfg.synth_seed;
    auto [pool, head] = generate_synthetic(spec);
    std::vector<int> train_rows(static_cast<std::size_t>(cfg.synth_train));
    std::iota(train_rows.begin(), train_rows.end(), 0);
    std::vector<int> test_rows(static_cast<std::size_t>(cfg.synth_test));
    std::iota(test_rows.begin(), test_rows.end(), cfg.synth_train);
    data.train = subset_pool(pool, train_rows);
    data.test = subset_pool(pool, test_rows);
    data.head = std::move(head);
    data.head.temperature = cfg.temperature;
  }
  data.train = normalize_rows(data.train);
  data.test = normalize_rows(data.test);
  data.train.validate();
  data.test.validate();
  data.head.validate();
  return data;
}

namespace {

int coverage_of(const EmbeddingPool& pool, const std::vector<int>& labeled) {
  std::set<int> classes;
  for (int id : labeled) classes.insert((*pool.labels)[static_cast<std::size_t>(id)]);
  return static_cast<int>(classes.size());
}

SeedRun run_single_seed(const ALConfig& cfg, const Dataset& data, Strategy strategy, std::uint64_t seed) {
  const int n_train = static_cast<int>(data.train.size());
  const int nominal_budget = static_cast<int>(std::ceil(cfg.budget_fraction * n_train));

  std::vector<int> all_test_ids(static_cast<std::size_t>(data.test.size()));
  std::iota(all_test_ids.begin(), all_test_ids.end(), 0);

  SeedRun run;
  run.seed = seed;
  std::vector<int> labeled;
  std::vector<int> unlabeled(static_cast<std::size_t>(n_train));
  std::iota(unlabeled.begin(), unlabeled.end(), 0);

  ClassHead current = data.head;
  for (int round = 1; round <= cfg.rounds; ++round) {
    if (unlabeled.empty()) break;
    const int budget = std::min<int>(nominal_budget, static_cast<int>(unlabeled.size()));

    QueryRequest req;
    req.pool = data.train;
    req.head = current;
    req.labeled_ids = labeled;
    req.unlabeled_ids = unlabeled;
    req.budget = budget;
    req.params = cfg.params;
    req.seed = round_seed(seed, round);
    const QuerySet query = round_one_policy(strategy, req);

    if (static_cast<int>(query.selected.size()) != budget) {
      throw std::logic_error("strategy returned a batch of the wrong size");
    }
    // oracle labeling: move the queried ids into the labeled partition
    std::set<int> picked(query.selected.begin(), query.selected.end());
    if (picked.size() != query.selected.size()) throw std::logic_error("strategy returned duplicate ids");
    std::vector<int> remaining;
    remaining.reserve(unlabeled.size() - picked.size());
    for (int id : unlabeled) {
      if (!picked.count(id)) remaining.push_back(id);
    }
    if (remaining.size() + picked.size() != unlabeled.size()) {
      throw std::logic_error("strategy selected ids outside the unlabeled pool");
    }
    unlabeled = std::move(remaining);
    labeled.insert(labeled.end(), query.selected.begin(), query.selected.end());

    TrainConfig tc = cfg.train;
    tc.seed = train_seed(seed, round);
    const TrainedHead trained = train_head(data.train, labeled, data.head, tc);
    current = trained.head;

    RoundRecord record;
    record.round = round;
    record.selected = query.selected;
    record.accuracy = evaluate(current, data.test, all_test_ids);
    record.coverage = coverage_of(data.train, labeled);
    record.budget = budget;
    record.truncated = budget < nominal_budget;
    if (query.per_sample_scores) {
      record.has_score = true;
      double sum = 0.0;
      for (double s : *query.per_sample_scores) sum += s;
      record.mean_score = sum / static_cast<double>(query.per_sample_scores->size());
    }
    run.rounds.push_back(std::move(record));
  }
  return run;
}

std::vector<double> round_values(const ExperimentReport& report, int round,
                                 double (*pick)(const RoundRecord&)) {
  std::vector<double> values;
  for (const SeedRun& run : report.runs) {
    for (const RoundRecord& record : run.rounds) {
      if (record.round == round) values.push_back(pick(record));
    }
  }
  return values;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double population_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mean = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace

double ExperimentReport::mean_accuracy(int round) const {
  return mean_of(round_values(*this, round, [](const RoundRecord& r) { return r.accuracy; }));
}

double ExperimentReport::std_accuracy(int round) const {
  return population_std(round_values(*this, round, [](const RoundRecord& r) { return r.accuracy; }));
}

double ExperimentReport::mean_coverage(int round) const {
  return mean_of(round_values(*this, round, [](const RoundRecord& r) { return static_cast<double>(r.coverage); }));
}

ExperimentReport run_experiment(const ALConfig& cfg, const Dataset& data) {
  cfg.validate();
  const Strategy strategy = parse_strategy(cfg.strategy);

  ExperimentReport report;
  report.strategy = cfg.strategy;
  report.nominal_budget = static_cast<int>(std::ceil(cfg.budget_fraction * static_cast<double>(data.train.size())));

  std::vector<int> all_test_ids(static_cast<std::size_t>(data.test.size()));
  std::iota(all_test_ids.begin(), all_test_ids.end(), 0);
  report.zero_shot_accuracy = evaluate(data.head, data.test, all_test_ids);

  for (std::uint64_t seed : cfg.seeds) {
    report.runs.push_back(run_single_seed(cfg, data, strategy, seed));
  }
  return report;
}

ExperimentReport run_experiment(const ALConfig& cfg) {
  const Dataset data = load_dataset(cfg);
  ExperimentReport report = run_experiment(cfg, data);
  std::filesystem::create_directories(cfg.out_dir);
  write_rounds_csv(report, cfg.out_dir + "/rounds.csv");
  write_summary_json(cfg, report, cfg.out_dir + "/summary.json");
  return report;
}

double zero_shot_report(const ALConfig& cfg) {
  const Dataset data = load_dataset(cfg);
  std::vector<int> all_test_ids(static_cast<std::size_t>(data.test.size()));
  std::iota(all_test_ids.begin(), all_test_ids.end(), 0);
  return evaluate(data.head, data.test, all_test_ids);
}

ComparisonReport compare_strategies(const ALConfig& cfg, const std::vector<std::string>& strategies,
                                    const Dataset& data) {
  if (strategies.size() < 2) throw ConfigError("compare needs at least two strategies");
  ComparisonReport comparison;
  for (const std::string& name : strategies) {
    ALConfig per = cfg;
    per.strategy = name;
    comparison.per_strategy.push_back(run_experiment(per, data));
  }
  return comparison;
}

ComparisonReport compare_strategies(const ALConfig& cfg, const std::vector<std::string>& strategies) {
  const Dataset data = load_dataset(cfg);
  return compare_strategies(cfg, strategies, data);
}

namespace {

std::string format_double(double v, const char* fmt = "%.6f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

ordered_json config_block(const ALConfig& cfg) {
  ordered_json j;
  j["strategy"] = cfg.strategy;
  j["rounds"] = cfg.rounds;
  j["budget_fraction"] = cfg.budget_fraction;
  j["temperature"] = cfg.temperature;
  j["top_n"] = cfg.params.top_n;
  j["knn_k"] = cfg.params.knn_k;
  j["alpha"] = cfg.params.alpha;
  j["epochs"] = cfg.train.epochs;
  j["lr"] = cfg.train.lr;
  j["momentum"] = cfg.train.momentum;
  j["weight_decay"] = cfg.train.weight_decay;
  j["batch_size"] = cfg.train.batch_size;
  j["cosine_schedule"] = cfg.train.cosine_schedule;
  j["seeds"] = cfg.seeds;
  if (cfg.uses_files()) {
    j["data"] = {{"train_embeddings", cfg.train_embeddings},
                 {"test_embeddings", cfg.test_embeddings},
                 {"class_head", cfg.class_head},
                 {"format", cfg.data_format}};
  } else {
    j["data"] = {{"synthetic", true},
                 {"classes", cfg.synth_classes},
                 {"dim", cfg.synth_dim},
                 {"train", cfg.synth_train},
                 {"test", cfg.synth_test},
                 {"class_weights", cfg.synth_class_weights},
                 {"spread", cfg.synth_spread},
                 {"outlier_fraction", cfg.synth_outlier_fraction},
                 {"seed", cfg.synth_seed}};
  }
  return j;
}

ordered_json report_block(const ExperimentReport& report) {
  ordered_json j;
  j["strategy"] = report.strategy;
  j["budget_per_round"] = report.nominal_budget;
  j["zero_shot_accuracy"] = report.zero_shot_accuracy;
  ordered_json rounds = ordered_json::array();
  const int round_count = report.runs.empty() ? 0 : static_cast<int>(report.runs.front().rounds.size());
  for (int round = 1; round <= round_count; ++round) {
    ordered_json r;
    r["round"] = round;
    r["mean_accuracy"] = report.mean_accuracy(round);
    r["std_accuracy"] = report.std_accuracy(round);
    r["mean_coverage"] = report.mean_coverage(round);
    ordered_json per_seed = ordered_json::array();
    for (const SeedRun& run : report.runs) {
      for (const RoundRecord& record : run.rounds) {
        if (record.round != round) continue;
        ordered_json s;
        s["seed"] = run.seed;
        s["accuracy"] = record.accuracy;
        s["coverage"] = record.coverage;
        s["b"] = record.budget;
        s["truncated"] = record.truncated;
        if (record.has_score) {
          s["mean_selection_score"] = record.mean_score;
        } else {
          s["mean_selection_score"] = nullptr;
        }
        s["selected"] = record.selected;
        per_seed.push_back(std::move(s));
      }
    }
    r["per_seed"] = std::move(per_seed);
    rounds.push_back(std::move(r));
  }
  j["rounds"] = std::move(rounds);
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path + ": cannot open file for writing");
  out << text;
  if (!out) throw DataError(path + ": write failed");
}

}  // namespace

void write_rounds_csv(const ExperimentReport& report, const std::string& path) {
  std::string csv = "round,seed,strategy,accuracy,coverage,b\n";
  for (const SeedRun& run : report.runs) {
    for (const RoundRecord& record : run.rounds) {
      csv += std::to_string(record.round) + "," + std::to_string(run.seed) + "," + report.strategy + "," +
             format_double(record.accuracy) + "," + std::to_string(record.coverage) + "," +
             std::to_string(record.budget) + "\n";
    }
  }
  write_text(path, csv);
}

std::string summary_json(const ALConfig& cfg, const ExperimentReport& report) {
  ordered_json j;
  j["config"] = config_block(cfg);
  j.update(report_block(report));
  return j.dump(2) + "\n";
}

void write_summary_json(const ALConfig& cfg, const ExperimentReport& report, const std::string& path) {
  write_text(path, summary_json(cfg, report));
}

void write_comparison_csv(const ComparisonReport& comparison, const std::string& path) {
  std::string csv = "round,strategy,mean_accuracy,std_accuracy,mean_coverage\n";
  for (const ExperimentReport& report : comparison.per_strategy) {
    const int round_count = report.runs.empty() ? 0 : static_cast<int>(report.runs.front().rounds.size());
    for (int round = 1; round <= round_count; ++round) {
      csv += std::to_string(round) + "," + report.strategy + "," + format_double(report.mean_accuracy(round)) +
             "," + format_double(report.std_accuracy(round)) + "," +
             format_double(report.mean_coverage(round), "%.2f") + "\n";
    }
  }
  write_text(path, csv);
}

std::string comparison_json(const ALConfig& cfg, const ComparisonReport& comparison) {
  ordered_json j;
  j["config"] = config_block(cfg);
  ordered_json strategies = ordered_json::array();
  for (const ExperimentReport& report : comparison.per_strategy) strategies.push_back(report_block(report));
  j["strategies"] = std::move(strategies);
  return j.dump(2) + "\n";
}

void write_comparison_json(const ALConfig& cfg, const ComparisonReport& comparison, const std::string& path) {
  write_text(path, comparison_json(cfg, comparison));
}

}  // namespace cec
