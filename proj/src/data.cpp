#include "cmc/data.hpp"

#include <atomic>
#include <cmath>

#include "cmc/error.hpp"

namespace cmc {

std::string family_name(Family f) {
  switch (f) {
    case Family::gaussian: return "gaussian";
    case Family::binomial: return "binomial";
    case Family::poisson: return "poisson";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  if (name == "gaussian") return Family::gaussian;
  if (name == "binomial") return Family::binomial;
  if (name == "poisson") return Family::poisson;
  throw UsageError("unknown family: " + name);
}

std::vector<int> ModelId::predictors() const {
  std::vector<int> out;
  for (int j = 0; j < 32; ++j) {
    if ((mask >> j) & 1u) out.push_back(j);
  }
  return out;
}

std::vector<int> ModelId::columns() const {
  std::vector<int> out{0};
  for (int j : predictors()) out.push_back(j + 1);
  return out;
}

namespace {
std::atomic<std::uint64_t> next_dataset_tag{1};
}

Dataset::Dataset(Eigen::VectorXd y, Eigen::MatrixXd X, Family family,
                 std::vector<std::string> names)
    : y_(std::move(y)),
      X_(std::move(X)),
      family_(family),
      names_(std::move(names)),
      tag_(next_dataset_tag.fetch_add(1)) {
  const int n = static_cast<int>(X_.rows());
  const int m = static_cast<int>(X_.cols());
  if (y_.size() != n) throw DataError("y length does not match X rows");
  if (m < 1 || n <= m) {
    throw DataError("need n > p+1 observations (n=" + std::to_string(n) +
                    ", p+1=" + std::to_string(m) + ")");
  }
  if (m > 26) throw DataError("at most 25 predictors supported");
  if (static_cast<int>(names_.size()) != m) {
    throw DataError("column name count does not match design width");
  }
  if ((X_.col(0).array() != 1.0).any()) {
    throw DataError("first design column must be the intercept (all ones)");
  }
  for (int i = 0; i < n; ++i) {
    double v = y_[i];
    if (!std::isfinite(v)) throw DataError("non-finite response at row " + std::to_string(i + 1));
    if (family_ == Family::binomial && v != 0.0 && v != 1.0) {
      throw DataError("binomial response must be 0 or 1; got " +
                      std::to_string(v) + " at row " + std::to_string(i + 1));
    }
    if (family_ == Family::poisson &&
        (v < 0.0 || v != std::floor(v))) {
      throw DataError("poisson response must be a non-negative integer; got " +
                      std::to_string(v) + " at row " + std::to_string(i + 1));
    }
  }

  // Full-rank check on the complete design.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X_);
  Eigen::VectorXd diag = qr.matrixR().diagonal().cwiseAbs();
  double dmax = diag.maxCoeff();
  for (int k = 0; k < m; ++k) {
    if (diag[k] <= 1e-10 * dmax) {
      // The pivoted column order tells us which columns are dependent.
      std::string offenders;
      for (int j = k; j < m; ++j) {
        int col = qr.colsPermutation().indices()[j];
        if (!offenders.empty()) offenders += ", ";
        offenders += names_[col];
      }
      throw DataError("design matrix is rank deficient; offending columns: " +
                      offenders);
    }
  }
}

}  // namespace cmc
