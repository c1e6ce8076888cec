#include "cec/config.hpp"

#include "cec/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace cec {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t consumed = 0;
    const int v = std::stoi(value, &consumed);
    if (consumed != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected integer, got '" + value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t consumed = 0;
    const double v = std::stod(value, &consumed);
    if (consumed != value.size() || !std::isfinite(v)) throw std::invalid_argument("bad number");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected number, got '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t consumed = 0;
    const unsigned long long v = std::stoull(value, &consumed);
    if (consumed != value.size()) throw std::invalid_argument("trailing characters");
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected unsigned integer, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "on") return true;
  if (value == "0" || value == "false" || value == "off") return false;
  throw ConfigError("config key '" + key + "': expected boolean, got '" + value + "'");
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    seeds.push_back(parse_u64("seeds", item));
  }
  if (seeds.empty()) throw ConfigError("seed list is empty");
  return seeds;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    values.push_back(parse_double("list", item));
  }
  return values;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ": line " + std::to_string(line_no) + " is not 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(path + ": empty key on line " + std::to_string(line_no));
    kv[key] = value;
  }
  return kv;
}

void apply_config(ALConfig& cfg, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    if (key == "strategy") cfg.strategy = value;
    else if (key == "rounds") cfg.rounds = parse_int(key, value);
    else if (key == "budget_fraction") cfg.budget_fraction = parse_double(key, value);
    else if (key == "top_n") cfg.params.top_n = parse_int(key, value);
    else if (key == "knn_k") cfg.params.knn_k = parse_int(key, value);
    else if (key == "alpha") cfg.params.alpha = parse_double(key, value);
    else if (key == "temperature") cfg.temperature = parse_double(key, value);
    else if (key == "seeds") cfg.seeds = parse_seed_list(value);
    else if (key == "epochs") cfg.train.epochs = parse_int(key, value);
    else if (key == "lr") cfg.train.lr = parse_double(key, value);
    else if (key == "momentum") cfg.train.momentum = parse_double(key, value);
    else if (key == "weight_decay") cfg.train.weight_decay = parse_double(key, value);
    else if (key == "batch_size") cfg.train.batch_size = parse_int(key, value);
    else if (key == "cosine_schedule") cfg.train.cosine_schedule = parse_bool(key, value);
    else if (key == "train_embeddings") cfg.train_embeddings = value;
    else if (key == "test_embeddings") cfg.test_embeddings = value;
    else if (key == "class_head") cfg.class_head = value;
    else if (key == "data_format") cfg.data_format = value;
    else if (key == "synth_classes") cfg.synth_classes = parse_int(key, value);
    else if (key == "synth_dim") cfg.synth_dim = parse_int(key, value);
    else if (key == "synth_train") cfg.synth_train = parse_int(key, value);
    else if (key == "synth_test") cfg.synth_test = parse_int(key, value);
    else if (key == "synth_class_weights") cfg.synth_class_weights = parse_double_list(value);
    else if (key == "synth_spread") cfg.synth_spread = parse_double(key, value);
    else if (key == "synth_outlier_fraction") cfg.synth_outlier_fraction = parse_double(key, value);
    else if (key == "synth_seed") cfg.synth_seed = parse_u64(key, value);
    else if (key == "out") cfg.out_dir = value;
    else throw ConfigError("unknown config key '" + key + "'");
  }
}

ALConfig load_config_file(const std::string& path) {
  ALConfig cfg;
  apply_config(cfg, read_config_file(path));
  return cfg;
}

void ALConfig::validate() const {
  if (rounds < 1) throw ConfigError("rounds must be >= 1");
  if (!(budget_fraction > 0.0)) throw ConfigError("budget_fraction must be positive");
  if (rounds * budget_fraction > 1.0 + 1e-12) {
    throw ConfigError("rounds * budget_fraction must not exceed 1");
  }
  if (params.top_n < 1) throw ConfigError("top_n must be >= 1");
  if (params.knn_k < 1) throw ConfigError("knn_k must be >= 1");
  if (!(params.alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (!(temperature > 0.0)) throw ConfigError("temperature must be positive");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  parse_strategy(strategy);
  train.validate();
  const bool any_file = !train_embeddings.empty() || !test_embeddings.empty() || !class_head.empty();
  const bool all_files = !train_embeddings.empty() && !test_embeddings.empty() && !class_head.empty();
  if (any_file && !all_files) {
    throw ConfigError("train_embeddings, test_embeddings and class_head must be given together");
  }
  if (!any_file) {
    if (synth_classes < 2) throw ConfigError("synth_classes must be >= 2");
    if (synth_dim < 2) throw ConfigError("synth_dim must be >= 2");
    if (synth_train < synth_classes) throw ConfigError("synth_train must be >= synth_classes");
    if (synth_test < 1) throw ConfigError("synth_test must be >= 1");
  }
  parse_format(data_format);
}

}  // namespace cec
