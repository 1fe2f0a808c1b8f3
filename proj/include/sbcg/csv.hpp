#pragma once

#include <Eigen/Dense>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbcg/io.hpp"

namespace sbcg {

// Ingest failure with the offending 1-based row/column attached.
struct IngestError : std::runtime_error {
  IngestError(const std::string& msg, std::size_t row_, std::size_t col_)
      : std::runtime_error(msg + " (row " + std::to_string(row_) + ", col " +
                           std::to_string(col_) + ")"),
        row(row_),
        col(col_) {}
  std::size_t row = 0;
  std::size_t col = 0;
};

// Comma-separated, header row, '.' decimal. Cells are kept as raw text so
// categorical columns survive ingest.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column_index(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw IngestError("missing column '" + name + "'", 1, 0);
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(trim(cur));
  return cells;
}

}  // namespace detail

inline CsvTable read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  CsvTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size())
      throw IngestError("expected " + std::to_string(table.header.size()) + " cells, got " +
                            std::to_string(cells.size()),
                        lineno, cells.size());
    table.rows.push_back(std::move(cells));
  }
  if (table.header.empty()) throw std::runtime_error("'" + path + "': empty file");
  if (table.rows.empty())
    throw IngestError("'" + path + "': header-only file, no data rows", 1, 0);
  return table;
}

inline double parse_csv_double(const std::string& cell, std::size_t row, std::size_t col) {
  double v = 0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end)
    throw IngestError("non-numeric cell '" + cell + "'", row, col);
  return v;
}

inline bool csv_cell_is_numeric(const std::string& cell) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  return ec == std::errc{} && ptr == cell.data() + cell.size();
}

// Matrix round-trip helpers; values are printed in shortest round-trip form so
// write -> read reproduces the matrix bit-exactly.
inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const Eigen::MatrixXd& values) {
  if (static_cast<Eigen::Index>(header.size()) != values.cols())
    throw std::invalid_argument("write_csv: header/column mismatch");
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i)
    os << (i ? "," : "") << header[i];
  os << "\n";
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c)
      os << (c ? "," : "") << format_double(values(r, c));
    os << "\n";
  }
  atomic_write_file(path, os.str());
}

inline std::pair<std::vector<std::string>, Eigen::MatrixXd> read_csv_matrix(
    const std::string& path) {
  CsvTable t = read_csv(path);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(t.rows.size()),
                    static_cast<Eigen::Index>(t.header.size()));
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (std::size_t c = 0; c < t.header.size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_csv_double(t.rows[r][c], r + 2, c + 1);
  return {t.header, m};
}

}  // namespace sbcg
