#include "herd/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "herd/errors.hpp"

namespace herd {

Matrix load_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw EmptyData("load_matrix_csv: cannot open " + path);
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      std::size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw MalformedRow(line_no, "not a number: '" + cell + "'");
      }
      while (used < cell.size() &&
             (cell[used] == ' ' || cell[used] == '\t')) {
        ++used;
      }
      if (used != cell.size()) {
        throw MalformedRow(line_no, "trailing junk in '" + cell + "'");
      }
      row.push_back(value);
    }
    if (row.empty()) {
      throw MalformedRow(line_no, "no cells");
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw MalformedRow(line_no, "ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw EmptyData("load_matrix_csv: " + path + " has no rows");
  }
  Matrix m(static_cast<Index>(rows.size()),
           static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return m;
}

void save_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) {
    throw EmptyData("save_matrix_csv: cannot open " + path);
  }
  char buffer[64];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", m(i, j));
      out << buffer;
      if (j + 1 < m.cols()) out << ',';
    }
    out << '\n';
  }
}

}  // namespace herd
