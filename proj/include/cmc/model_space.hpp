#ifndef CMC_MODEL_SPACE_HPP
#define CMC_MODEL_SPACE_HPP

#include <functional>
#include <vector>

#include "cmc/glm.hpp"

namespace cmc {

struct SearchBudget {
  int max_size = -1;          // -1 means all sizes up to p
  int exhaustive_limit = 25;  // refuse exhaustive search beyond this p
  int threads = 0;            // 0 means use all available

  int resolved_max_size(int p) const {
    return (max_size < 0 || max_size > p) ? p : max_size;
  }
};

/// Per-size best models M*_0 .. M*_k with their fits.
struct MLSet {
  struct Entry {
    ModelId model;
    FitResult fit;
  };
  std::vector<Entry> entries;  // entries[j] has exactly j predictors
  std::vector<std::string> warnings;

  int max_size() const { return static_cast<int>(entries.size()) - 1; }
};

/// All C(p, j) size-j masks in ascending (lexicographic) mask order.
std::vector<ModelId> models_of_size(int p, int j);

/// The size-j model of highest log-likelihood; exact-likelihood ties
/// (within 1e-10) broken by smallest mask.
MLSet::Entry best_of_size(const Dataset& data, int j,
                          const SearchBudget& budget = {});

/// M*_j for j = 0..k. Log-likelihood is non-decreasing in j.
MLSet ml_set(const Dataset& data, const SearchBudget& budget = {});

/// Deterministic parallel map over [0, count): results are written into a
/// preallocated slot per index, so aggregation order never matters.
void parallel_for_indexed(int count, int threads,
                          const std::function<void(int)>& body);

}  // namespace cmc

#endif
