#include "cec/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace cec {

namespace {

constexpr char kPoolMagic[4] = {'E', 'M', 'B', '1'};
constexpr char kLabelMagic[4] = {'L', 'B', 'L', '1'};

std::uint32_t read_u32_le(std::istream& in, const std::string& path, const char* what) {
  unsigned char buf[4];
  const auto at = in.tellg();
  if (!in.read(reinterpret_cast<char*>(buf), 4)) {
    throw DataError(path + ": truncated file, expected " + what + " at byte " + std::to_string(static_cast<long long>(at)));
  }
  return static_cast<std::uint32_t>(buf[0]) | (static_cast<std::uint32_t>(buf[1]) << 8) |
         (static_cast<std::uint32_t>(buf[2]) << 16) | (static_cast<std::uint32_t>(buf[3]) << 24);
}

void write_u32_le(std::ostream& out, std::uint32_t v) {
  const unsigned char buf[4] = {static_cast<unsigned char>(v & 0xff), static_cast<unsigned char>((v >> 8) & 0xff),
                                static_cast<unsigned char>((v >> 16) & 0xff),
                                static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(buf), 4);
}

void expect_magic(std::istream& in, const std::string& path, const char (&magic)[4]) {
  char buf[4] = {};
  if (!in.read(buf, 4) || std::memcmp(buf, magic, 4) != 0) {
    throw DataError(path + ": bad magic at byte 0, expected '" + std::string(magic, 4) + "'");
  }
}

void expect_eof(std::istream& in, const std::string& path) {
  char extra;
  if (in.read(&extra, 1)) throw DataError(path + ": trailing bytes after payload");
}

Matrix load_binary_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path + ": cannot open file");
  expect_magic(in, path, kPoolMagic);
  const std::uint32_t n = read_u32_le(in, path, "row count");
  const std::uint32_t d = read_u32_le(in, path, "column count");
  if (n < 1) throw DataError(path + ": row count must be >= 1");
  if (d < 2) throw DataError(path + ": column count must be >= 2, got " + std::to_string(d));
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::vector<float> row(d);
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto at = in.tellg();
    if (!in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(sizeof(float) * d))) {
      throw DataError(path + ": truncated payload in row " + std::to_string(i) + " at byte " +
                      std::to_string(static_cast<long long>(at)));
    }
    for (std::uint32_t j = 0; j < d; ++j) {
      if (!std::isfinite(row[j])) {
        throw DataError(path + ": non-finite value at row " + std::to_string(i) + ", column " + std::to_string(j) +
                        " (byte " + std::to_string(12 + (static_cast<long long>(i) * d + j) * 4) + ")");
      }
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = static_cast<double>(row[j]);
    }
  }
  expect_eof(in, path);
  return m;
}

void save_binary_matrix(const Matrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path + ": cannot open file for writing");
  out.write(kPoolMagic, 4);
  write_u32_le(out, static_cast<std::uint32_t>(m.rows()));
  write_u32_le(out, static_cast<std::uint32_t>(m.cols()));
  std::vector<float> row(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = static_cast<float>(m(i, j));
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(sizeof(float) * row.size()));
  }
  if (!out) throw DataError(path + ": write failed");
}

std::pair<std::vector<int>, int> load_binary_labels(const std::string& path, Eigen::Index expected_n) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path + ": cannot open file");
  expect_magic(in, path, kLabelMagic);
  const std::uint32_t n = read_u32_le(in, path, "label count");
  const std::uint32_t k = read_u32_le(in, path, "class count");
  if (static_cast<Eigen::Index>(n) != expected_n) {
    throw DataError(path + ": label count " + std::to_string(n) + " does not match pool size " +
                    std::to_string(expected_n));
  }
  if (k < 2) throw DataError(path + ": class count must be >= 2");
  std::vector<int> labels(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t y = read_u32_le(in, path, "label");
    if (y >= k) {
      throw DataError(path + ": label " + std::to_string(y) + " out of range [0," + std::to_string(k) +
                      ") at row " + std::to_string(i));
    }
    labels[i] = static_cast<int>(y);
  }
  expect_eof(in, path);
  return {std::move(labels), static_cast<int>(k)};
}

void save_binary_labels(const std::vector<int>& labels, int num_classes, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(path + ": cannot open file for writing");
  out.write(kLabelMagic, 4);
  write_u32_le(out, static_cast<std::uint32_t>(labels.size()));
  write_u32_le(out, static_cast<std::uint32_t>(num_classes));
  for (int y : labels) write_u32_le(out, static_cast<std::uint32_t>(y));
  if (!out) throw DataError(path + ": write failed");
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

struct CsvContents {
  Matrix vectors;
  std::optional<std::vector<int>> labels;
  std::optional<int> num_classes;
};

CsvContents load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open file");

  std::string line;
  bool has_labels = false;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  bool first_line = true;
  int row_index = 0;
  while (std::getline(in, line)) {
    const std::string body = trim(line);
    if (first_line) {
      first_line = false;
      if (body.rfind("has_labels=", 0) == 0) {
        const std::string flag = trim(body.substr(std::string("has_labels=").size()));
        if (flag == "1") {
          has_labels = true;
        } else if (flag != "0") {
          throw DataError(path + ": malformed header '" + body + "' (expected has_labels=0|1)");
        }
        continue;
      }
    }
    if (body.empty()) continue;

    std::vector<std::string> fields;
    std::stringstream ss(body);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!body.empty() && body.back() == ',') fields.push_back("");

    const std::size_t value_count = has_labels ? fields.size() - 1 : fields.size();
    if (has_labels && fields.size() < 2) {
      throw DataError(path + ": row " + std::to_string(row_index) + " has no label column");
    }
    std::vector<double> values(value_count);
    for (std::size_t j = 0; j < value_count; ++j) {
      try {
        std::size_t consumed = 0;
        values[j] = std::stod(fields[j], &consumed);
        if (consumed != fields[j].size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw DataError(path + ": malformed number '" + fields[j] + "' at row " + std::to_string(row_index) +
                        ", column " + std::to_string(j));
      }
      if (!std::isfinite(values[j])) {
        throw DataError(path + ": non-finite value at row " + std::to_string(row_index) + ", column " +
                        std::to_string(j));
      }
      values[j] = quantize_f32(values[j]);
    }
    if (has_labels) {
      const std::string& field_y = fields.back();
      int y = 0;
      try {
        std::size_t consumed = 0;
        y = std::stoi(field_y, &consumed);
        if (consumed != field_y.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw DataError(path + ": malformed label '" + field_y + "' at row " + std::to_string(row_index));
      }
      if (y < 0) throw DataError(path + ": negative label at row " + std::to_string(row_index));
      labels.push_back(y);
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw DataError(path + ": row " + std::to_string(row_index) + " has " + std::to_string(values.size()) +
                      " values, expected " + std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(values));
    ++row_index;
  }
  if (rows.empty()) throw DataError(path + ": no data rows");
  if (rows.front().size() < 2) throw DataError(path + ": dimension must be >= 2");

  CsvContents out;
  out.vectors.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      out.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  if (has_labels) {
    int max_label = 0;
    for (int y : labels) max_label = std::max(max_label, y);
    out.labels = std::move(labels);
    out.num_classes = max_label + 1;
  }
  return out;
}

void save_csv(const Matrix& m, const std::optional<std::vector<int>>& labels, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError(path + ": cannot open file for writing");
  char buf[64];
  if (labels) out << "has_labels=1\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      // %.9g round-trips float32 exactly
      std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(static_cast<float>(m(i, j))));
      if (j > 0) out << ',';
      out << buf;
    }
    if (labels) out << ',' << (*labels)[static_cast<std::size_t>(i)];
    out << '\n';
  }
  if (!out) throw DataError(path + ": write failed");
}

bool file_exists(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return static_cast<bool>(in);
}

}  // namespace

FileFormat parse_format(const std::string& name) {
  if (name == "binary") return FileFormat::binary;
  if (name == "csv") return FileFormat::csv;
  throw ConfigError("unknown file format '" + name + "' (expected binary or csv)");
}

std::string label_sibling_path(const std::string& pool_path) {
  const auto slash = pool_path.find_last_of("/\\");
  const auto dot = pool_path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return pool_path + ".lbl";
  return pool_path.substr(0, dot) + ".lbl";
}

EmbeddingPool load_pool(const std::string& path, FileFormat format) {
  if (format == FileFormat::binary) {
    Matrix vectors = load_binary_matrix(path);
    std::optional<std::vector<int>> labels;
    std::optional<int> num_classes;
    const std::string sibling = label_sibling_path(path);
    if (file_exists(sibling)) {
      auto [loaded, k] = load_binary_labels(sibling, vectors.rows());
      labels = std::move(loaded);
      num_classes = k;
    }
    return make_pool(std::move(vectors), std::move(labels), num_classes);
  }
  CsvContents csv = load_csv(path);
  return make_pool(std::move(csv.vectors), std::move(csv.labels), csv.num_classes);
}

void save_pool(const EmbeddingPool& pool, const std::string& path, FileFormat format) {
  pool.validate();
  if (format == FileFormat::binary) {
    save_binary_matrix(pool.vectors, path);
    if (pool.labels) save_binary_labels(*pool.labels, pool.num_classes.value(), label_sibling_path(path));
    return;
  }
  save_csv(pool.vectors, pool.labels, path);
}

ClassHead load_head(const std::string& path, FileFormat format, double temperature) {
  ClassHead head;
  head.class_embeddings = format == FileFormat::binary ? load_binary_matrix(path) : load_csv(path).vectors;
  head.temperature = temperature;
  head.validate();
  return head;
}

void save_head(const ClassHead& head, const std::string& path, FileFormat format) {
  head.validate();
  if (format == FileFormat::binary) {
    save_binary_matrix(head.class_embeddings, path);
  } else {
    save_csv(head.class_embeddings, std::nullopt, path);
  }
}

Matrix normalize_matrix_rows(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double norm = m.row(i).norm();
    if (norm == 0.0) throw DataError("zero-norm row " + std::to_string(i) + " cannot be normalized");
    out.row(i) = m.row(i) / norm;
  }
  return out;
}

EmbeddingPool normalize_rows(const EmbeddingPool& pool) {
  EmbeddingPool out = pool;
  out.vectors = normalize_matrix_rows(pool.vectors);
  return out;
}

}  // namespace cec
