#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "charshrink/matrix.hpp"

namespace charshrink {

/// Formats with 17 significant digits so a write/read round trip is exact.
std::string format_double(double v);

/// Plain numeric CSV, comma separated, no header by default. When `header`
/// is non-null its entries are written as a first row.
void write_matrix_csv(const std::filesystem::path& path, const DenseMatrix& M,
                      const std::vector<std::string>* header = nullptr);

/// Reads a numeric CSV. `has_header` skips the first row. Ragged or
/// non-numeric input throws std::invalid_argument naming the line.
DenseMatrix read_matrix_csv(const std::filesystem::path& path,
                            bool has_header = false);

/// Generic table writer used for trace/selection/study CSVs: one header row,
/// then rows of preformatted cells.
void write_table_csv(const std::filesystem::path& path,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows);

}  // namespace charshrink
