#ifndef CMC_DATA_HPP
#define CMC_DATA_HPP

#include <Eigen/Dense>
#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace cmc {

enum class Family { gaussian, binomial, poisson };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

/// Submodel identifier: bit j set means predictor x_{j+1} is included.
/// The intercept is always included and is not part of the mask.
struct ModelId {
  std::uint32_t mask = 0;

  int size() const { return std::popcount(mask); }
  bool contains(int predictor) const { return (mask >> predictor) & 1u; }
  bool is_subset_of(ModelId other) const { return (mask & ~other.mask) == 0; }

  /// Predictor indices (0-based, excluding intercept) in ascending order.
  std::vector<int> predictors() const;

  /// Design-matrix column indices: 0 (intercept) plus included predictors.
  std::vector<int> columns() const;

  static ModelId full(int p) {
    return ModelId{p == 32 ? ~0u : ((1u << p) - 1u)};
  }
  static ModelId empty() { return ModelId{0}; }

  friend bool operator==(ModelId a, ModelId b) { return a.mask == b.mask; }
  friend bool operator<(ModelId a, ModelId b) { return a.mask < b.mask; }
};

/// Immutable regression dataset. X has an explicit leading intercept
/// column of ones; p is the number of non-intercept predictors.
class Dataset {
public:
  /// Validates shape, family-specific response values, and full column
  /// rank of X. Column names cover all p+1 design columns.
  Dataset(Eigen::VectorXd y, Eigen::MatrixXd X, Family family,
          std::vector<std::string> names);

  const Eigen::VectorXd& y() const { return y_; }
  const Eigen::MatrixXd& X() const { return X_; }
  Family family() const { return family_; }
  const std::vector<std::string>& names() const { return names_; }

  int n() const { return static_cast<int>(X_.rows()); }
  int p() const { return static_cast<int>(X_.cols()) - 1; }

  /// Unique per-object tag; used to detect fits from different datasets
  /// being mixed in one comparison.
  std::uint64_t tag() const { return tag_; }

  /// Name of predictor j (0-based, excluding intercept).
  const std::string& predictor_name(int j) const { return names_[j + 1]; }

private:
  Eigen::VectorXd y_;
  Eigen::MatrixXd X_;
  Family family_;
  std::vector<std::string> names_;
  std::uint64_t tag_;
};

}  // namespace cmc

#endif
