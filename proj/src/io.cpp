#include "cmc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cmc/error.hpp"

namespace cmc {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    // Trim surrounding whitespace.
    auto b = cell.find_first_not_of(" \t\r");
    auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_number(const std::string& cell, int row, const std::string& col) {
  double v;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
    throw DataError("non-numeric cell '" + cell + "' at row " +
                    std::to_string(row) + ", column " + col);
  }
  return v;
}

}  // namespace

Dataset ingest_csv_text(const std::string& text, const std::string& path,
                        const std::string& response,
                        const std::vector<std::string>& predictors,
                        Family family) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  std::vector<std::string> header = split_csv_line(line);

  auto col_index = [&](const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw DataError(path + ": column '" + name + "' not found");
    }
    return static_cast<int>(it - header.begin());
  };

  int y_col = col_index(response);
  std::vector<int> x_cols;
  if (predictors.empty()) {
    for (int j = 0; j < static_cast<int>(header.size()); ++j) {
      if (j != y_col) x_cols.push_back(j);
    }
  } else {
    for (const auto& name : predictors) {
      int j = col_index(name);
      if (j == y_col) {
        throw DataError(path + ": response '" + response +
                        "' listed as a predictor");
      }
      x_cols.push_back(j);
    }
  }
  if (x_cols.empty()) throw DataError(path + ": no predictor columns");

  std::vector<std::vector<double>> rows;
  std::vector<int> row_lines;  // file line of each kept data row
  int row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw DataError(path + ": row " + std::to_string(row_no) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(header.size()));
    }
    std::vector<double> parsed(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (cells[j].empty()) {
        throw DataError(path + ": missing value at row " +
                        std::to_string(row_no) + ", column " + header[j]);
      }
      parsed[j] = parse_number(cells[j], row_no, header[j]);
    }
    rows.push_back(std::move(parsed));
    row_lines.push_back(row_no);
  }
  const int n = static_cast<int>(rows.size());
  const int p = static_cast<int>(x_cols.size());
  if (n == 0) throw DataError(path + ": no data rows");

  Eigen::VectorXd y(n);
  Eigen::MatrixXd X(n, p + 1);
  for (int i = 0; i < n; ++i) {
    y[i] = rows[i][y_col];
    X(i, 0) = 1.0;
    for (int k = 0; k < p; ++k) X(i, k + 1) = rows[i][x_cols[k]];
  }

  // Validate the response here so errors carry file line numbers; Dataset
  // re-checks the same invariants but only knows data-row indices.
  for (int i = 0; i < n; ++i) {
    if (family == Family::binomial && y[i] != 0.0 && y[i] != 1.0) {
      throw DataError(path + ": binomial response must be 0 or 1; got " +
                      std::to_string(y[i]) + " at row " +
                      std::to_string(row_lines[i]));
    }
    if (family == Family::poisson &&
        (y[i] < 0.0 || y[i] != std::floor(y[i]))) {
      throw DataError(path +
                      ": poisson response must be a non-negative integer; "
                      "got " +
                      std::to_string(y[i]) + " at row " +
                      std::to_string(row_lines[i]));
    }
  }

  for (int k = 0; k < p; ++k) {
    double lo = X.col(k + 1).minCoeff();
    double hi = X.col(k + 1).maxCoeff();
    if (lo == hi) {
      throw DataError(path + ": predictor column '" + header[x_cols[k]] +
                      "' is constant");
    }
  }

  std::vector<std::string> names{"(Intercept)"};
  for (int k = 0; k < p; ++k) names.push_back(header[x_cols[k]]);
  return Dataset(std::move(y), std::move(X), family, std::move(names));
}

Dataset ingest_csv(const std::string& path, const std::string& response,
                   const std::vector<std::string>& predictors, Family family) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open input file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return ingest_csv_text(buf.str(), path, response, predictors, family);
}

}  // namespace cmc
