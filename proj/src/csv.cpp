#include "charshrink/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace charshrink {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_matrix_csv(const std::filesystem::path& path, const DenseMatrix& M,
                      const std::vector<std::string>* header) {
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("cannot open for writing: " + path.string());
  }
  if (header != nullptr) {
    for (size_t j = 0; j < header->size(); ++j) {
      if (j > 0) out << ',';
      out << (*header)[j];
    }
    out << '\n';
  }
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(M(i, j));
    }
    out << '\n';
  }
  if (!out) {
    throw std::invalid_argument("write failed: " + path.string());
  }
}

DenseMatrix read_matrix_csv(const std::filesystem::path& path,
                            bool has_header) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open: " + path.string());
  }
  std::vector<double> entries;
  std::string line;
  Index rows = 0;
  Index cols = -1;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (has_header && lineno == 1) continue;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Index ncell = 0;
    while (std::getline(ss, cell, ',')) {
      size_t pos = 0;
      double v;
      try {
        v = std::stod(cell, &pos);
      } catch (const std::exception&) {
        throw std::invalid_argument(path.string() + ":" +
                                    std::to_string(lineno) +
                                    ": not a number: '" + cell + "'");
      }
      entries.push_back(v);
      ++ncell;
    }
    if (cols == -1) {
      cols = ncell;
    } else if (ncell != cols) {
      throw std::invalid_argument(
          path.string() + ":" + std::to_string(lineno) + ": expected " +
          std::to_string(cols) + " columns, got " + std::to_string(ncell));
    }
    ++rows;
  }
  if (rows == 0) {
    throw std::invalid_argument(path.string() + ": empty matrix");
  }
  return DenseMatrix::from_row_major(rows, cols, entries);
}

void write_table_csv(const std::filesystem::path& path,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("cannot open for writing: " + path.string());
  }
  for (size_t j = 0; j < header.size(); ++j) {
    if (j > 0) out << ',';
    out << header[j];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (size_t j = 0; j < row.size(); ++j) {
      if (j > 0) out << ',';
      out << row[j];
    }
    out << '\n';
  }
  if (!out) {
    throw std::invalid_argument("write failed: " + path.string());
  }
}

}  // namespace charshrink
