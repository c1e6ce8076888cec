#include "cec/driver.hpp"
#include "cec/io.hpp"
#include "cec/synthetic.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace {

// Collects CLI overrides as config key/value pairs so file values and flag
// values flow through the same parser.
struct Overrides {
  std::map<std::string, std::string> kv;

  void add_flag(CLI::App* cmd, const std::string& key, const std::string& description) {
    const std::string flag = "--" + flag_name(key);
    cmd->add_option_function<std::string>(
        flag, [this, key](const std::string& value) { kv[key] = value; }, description);
  }

  static std::string flag_name(std::string key) {
    for (char& c : key) {
      if (c == '_') c = '-';
    }
    return key;
  }
};

cec::ALConfig build_config(const std::string& config_path, const Overrides& overrides) {
  cec::ALConfig cfg;
  if (!config_path.empty()) cec::apply_config(cfg, cec::read_config_file(config_path));
  cec::apply_config(cfg, overrides.kv);
  return cfg;
}

void add_common_options(CLI::App* cmd, std::string& config_path, Overrides& overrides) {
  cmd->add_option("--config", config_path, "flat key = value config file");
  for (const char* key :
       {"strategy", "rounds", "budget_fraction", "top_n", "knn_k", "alpha", "temperature", "seeds", "epochs",
        "lr", "momentum", "weight_decay", "batch_size", "cosine_schedule", "train_embeddings", "test_embeddings",
        "class_head", "data_format", "synth_classes", "synth_dim", "synth_train", "synth_test",
        "synth_class_weights", "synth_spread", "synth_outlier_fraction", "synth_seed", "out"}) {
    overrides.add_flag(cmd, key, "config key " + std::string(key));
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

void print_report(const cec::ExperimentReport& report) {
  std::printf("strategy %s  zero-shot accuracy %.4f\n", report.strategy.c_str(), report.zero_shot_accuracy);
  const int rounds = report.runs.empty() ? 0 : static_cast<int>(report.runs.front().rounds.size());
  for (int round = 1; round <= rounds; ++round) {
    std::printf("round %d  accuracy %.4f +- %.4f  coverage %.1f\n", round, report.mean_accuracy(round),
                report.std_accuracy(round), report.mean_coverage(round));
  }
}

int run_command(const std::string& config_path, const Overrides& overrides) {
  const cec::ALConfig cfg = build_config(config_path, overrides);
  cfg.validate();
  const cec::ExperimentReport report = cec::run_experiment(cfg);
  print_report(report);
  std::printf("wrote %s/rounds.csv and %s/summary.json\n", cfg.out_dir.c_str(), cfg.out_dir.c_str());
  return 0;
}

int compare_command(const std::string& config_path, const Overrides& overrides) {
  cec::ALConfig cfg = build_config(config_path, overrides);
  const std::vector<std::string> strategies = split_list(cfg.strategy);
  if (strategies.size() < 2) throw cec::ConfigError("compare needs --strategy with a comma-separated list");
  cfg.strategy = strategies.front();  // placeholder so validate() sees one name
  cfg.validate();
  for (const std::string& name : strategies) cec::parse_strategy(name);

  const cec::ComparisonReport comparison = cec::compare_strategies(cfg, strategies);
  for (const cec::ExperimentReport& report : comparison.per_strategy) print_report(report);
  std::filesystem::create_directories(cfg.out_dir);
  cec::write_comparison_csv(comparison, cfg.out_dir + "/comparison.csv");
  cec::write_comparison_json(cfg, comparison, cfg.out_dir + "/comparison.json");
  std::printf("wrote %s/comparison.csv and %s/comparison.json\n", cfg.out_dir.c_str(), cfg.out_dir.c_str());
  return 0;
}

int zeroshot_command(const std::string& config_path, const Overrides& overrides) {
  const cec::ALConfig cfg = build_config(config_path, overrides);
  cfg.validate();
  std::printf("zero_shot_accuracy %.6f\n", cec::zero_shot_report(cfg));
  return 0;
}

int synth_command(const std::string& config_path, const Overrides& overrides) {
  const cec::ALConfig cfg = build_config(config_path, overrides);
  cfg.validate();
  if (cfg.uses_files()) throw cec::ConfigError("synth generates data; do not pass embedding paths");

  cec::SyntheticSpec spec;
  spec.num_classes = cfg.synth_classes;
  spec.dim = cfg.synth_dim;
  spec.pool_size = cfg.synth_train + cfg.synth_test;
  spec.class_weights = cfg.synth_class_weights.empty()
                           ? std::vector<double>(static_cast<std::size_t>(cfg.synth_classes), 1.0 / cfg.synth_classes)
                           : cec::normalize_weights(cfg.synth_class_weights);
  spec.cluster_spread = cfg.synth_spread;
  spec.outlier_fraction = cfg.synth_outlier_fraction;
  spec.seed = cfg.synth_seed;
  const auto [pool, head] = cec::generate_synthetic(spec);

  std::vector<int> train_rows(static_cast<std::size_t>(cfg.synth_train));
  std::iota(train_rows.begin(), train_rows.end(), 0);
  std::vector<int> test_rows(static_cast<std::size_t>(cfg.synth_test));
  std::iota(test_rows.begin(), test_rows.end(), cfg.synth_train);

  const cec::FileFormat format = cec::parse_format(cfg.data_format);
  const std::string ext = format == cec::FileFormat::binary ? ".emb" : ".csv";
  std::filesystem::create_directories(cfg.out_dir);
  cec::save_pool(cec::subset_pool(pool, train_rows), cfg.out_dir + "/train" + ext, format);
  cec::save_pool(cec::subset_pool(pool, test_rows), cfg.out_dir + "/test" + ext, format);
  cec::save_head(head, cfg.out_dir + "/head" + ext, format);
  std::printf("wrote train%s, test%s, head%s to %s\n", ext.c_str(), ext.c_str(), ext.c_str(), cfg.out_dir.c_str());
  return 0;
}

int validate_command(const std::string& config_path, const Overrides& overrides) {
  const cec::ALConfig cfg = build_config(config_path, overrides);
  if (!cfg.uses_files()) throw cec::ConfigError("validate needs --train-embeddings/--test-embeddings/--class-head");
  const cec::FileFormat format = cec::parse_format(cfg.data_format);

  const cec::EmbeddingPool train = cec::load_pool(cfg.train_embeddings, format);
  std::printf("%s: ok, n=%lld d=%lld labels=%s\n", cfg.train_embeddings.c_str(),
              static_cast<long long>(train.size()), static_cast<long long>(train.dim()),
              train.labels ? "yes" : "no");
  const cec::EmbeddingPool test = cec::load_pool(cfg.test_embeddings, format);
  std::printf("%s: ok, n=%lld d=%lld labels=%s\n", cfg.test_embeddings.c_str(),
              static_cast<long long>(test.size()), static_cast<long long>(test.dim()),
              test.labels ? "yes" : "no");
  const cec::ClassHead head = cec::load_head(cfg.class_head, format, cfg.temperature);
  std::printf("%s: ok, K=%lld d=%lld\n", cfg.class_head.c_str(), static_cast<long long>(head.num_classes()),
              static_cast<long long>(head.dim()));
  if (train.dim() != head.dim() || test.dim() != head.dim()) throw cec::DataError("pool/head dimension mismatch");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"active-learning selection engine (CEC and baselines) over dense embedding pools"};
  app.require_subcommand(1);

  struct Sub {
    CLI::App* cmd = nullptr;
    std::string config_path;
    Overrides overrides;
  };
  std::map<std::string, Sub> subs;
  const std::pair<const char*, const char*> kCommands[] = {
      {"run", "run one strategy across rounds and seeds"},
      {"compare", "run several strategies on identical data/seeds"},
      {"zeroshot", "evaluate the untrained zero-shot head"},
      {"synth", "generate synthetic embedding/label/head files"},
      {"validate", "check data files against the format contracts"},
  };
  for (const auto& [name, description] : kCommands) {
    Sub& sub = subs[name];
    sub.cmd = app.add_subcommand(name, description);
    add_common_options(sub.cmd, sub.config_path, sub.overrides);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    for (auto& [name, sub] : subs) {
      if (!sub.cmd->parsed()) continue;
      if (name == "run") return run_command(sub.config_path, sub.overrides);
      if (name == "compare") return compare_command(sub.config_path, sub.overrides);
      if (name == "zeroshot") return zeroshot_command(sub.config_path, sub.overrides);
      if (name == "synth") return synth_command(sub.config_path, sub.overrides);
      if (name == "validate") return validate_command(sub.config_path, sub.overrides);
    }
    std::fprintf(stderr, "no subcommand given\n");
    return 1;
  } catch (const cec::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const cec::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
