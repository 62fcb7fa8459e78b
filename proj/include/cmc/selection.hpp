#ifndef CMC_SELECTION_HPP
#define CMC_SELECTION_HPP

#include <optional>
#include <string>
#include <vector>

#include "cmc/model_space.hpp"

namespace cmc {

/// Confidence-level policy for the CMC region.
struct AlphaMode {
  enum class Kind { fixed, schedule };
  Kind kind = Kind::schedule;
  double alpha = 0.5;  // fixed mode, in (0,1)
  double gamma = 0.5;  // schedule mode, in (0,1): threshold is n^gamma

  static AlphaMode Fixed(double alpha);
  static AlphaMode Schedule(double gamma);
  std::string describe() const;
};

/// Chi-square scale cutoff for the likelihood-ratio region.
struct Threshold {
  double value = 0.0;
  double alpha_effective = 0.0;
  int df = 0;  // p + 1
};

/// Fixed mode: value = chi2_quantile(1 - alpha, p+1).
/// Schedule mode: value = n^gamma exactly, alpha_effective from the CDF.
Threshold make_threshold(const AlphaMode& mode, int n, int p);

/// Likelihood ratio lambda = -2 (loglik_j - loglik_full) >= 0.
/// Values in [-1e-8, 0] are clamped to 0; anything more negative signals
/// an internal inconsistency and throws.
double lambda_of(const FitResult& fit_j, const FitResult& fit_full);

enum class Criterion { cmc, aic, bic, hq };
std::string criterion_name(Criterion c);

struct SelectionResult {
  Criterion criterion = Criterion::cmc;
  ModelId selected;
  FitResult fit;
  struct SizeRow {
    int size = 0;
    ModelId model;
    double lambda = 0.0;
    bool in_region = false;           // cmc only
    std::optional<double> score;      // information criteria only
  };
  std::vector<SizeRow> lambda_by_size;
  std::optional<Threshold> threshold;  // cmc only
  std::optional<AlphaMode> alpha_mode; // cmc only
  std::vector<std::string> warnings;
};

/// CMC selection: the most sparse per-size best model whose fit lies in
/// the likelihood-ratio region; smallest such size wins. Equivalent to
/// the brute-force minimum over all submodels with likelihood tie-break.
SelectionResult cmc_select(const Dataset& data, const AlphaMode& mode,
                           const SearchBudget& budget = {});
SelectionResult cmc_select_from(const Dataset& data, const MLSet& set,
                                const AlphaMode& mode);

/// Information-criterion selection over the maximum likelihood set.
/// Penalties per parameter count m = size + 1: AIC 2m, BIC m ln n,
/// HQ 2m ln ln n.
SelectionResult ic_select(const Dataset& data, Criterion criterion,
                          const SearchBudget& budget = {});
SelectionResult ic_select_from(const Dataset& data, const MLSet& set,
                               Criterion criterion);

/// One comparison mode: either a CMC alpha policy or an IC.
struct CompareMode {
  Criterion criterion = Criterion::cmc;
  std::optional<AlphaMode> alpha;  // required when criterion == cmc
  std::string label() const;
};

/// Parse "cmc:gamma=0.5", "cmc:alpha=0.1", "aic", "bic", "hq".
CompareMode parse_mode(const std::string& text);

struct ComparisonReport {
  MLSet set;
  std::vector<std::pair<CompareMode, SelectionResult>> rows;
};

/// Run every mode against one shared maximum likelihood set.
ComparisonReport compare(const Dataset& data,
                         const std::vector<CompareMode>& modes,
                         const SearchBudget& budget = {});

}  // namespace cmc

#endif
