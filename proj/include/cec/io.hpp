#pragma once

#include "cec/types.hpp"

#include <string>

namespace cec {

enum class FileFormat { binary, csv };

FileFormat parse_format(const std::string& name);

// Binary pool: magic "EMB1", little-endian u32 n, u32 d, then n*d float32
// row-major. Sibling label file (binary only): magic "LBL1", u32 n, u32 K,
// then n*u32 labels. The sibling path swaps the pool file's extension for
// ".lbl" (appends it when the path has none).
//
// CSV pool: one row per sample, comma-separated decimal floats. An optional
// first line "has_labels=1" declares a final integer label column.
EmbeddingPool load_pool(const std::string& path, FileFormat format);
void save_pool(const EmbeddingPool& pool, const std::string& path, FileFormat format);

// Class heads reuse the pool matrix formats; the temperature is configuration.
ClassHead load_head(const std::string& path, FileFormat format, double temperature);
void save_head(const ClassHead& head, const std::string& path, FileFormat format);

std::string label_sibling_path(const std::string& pool_path);

// Every row scaled to unit L2 norm. Throws DataError naming the row when a
// row has zero norm.
EmbeddingPool normalize_rows(const EmbeddingPool& pool);
Matrix normalize_matrix_rows(const Matrix& m);

}  // namespace cec
