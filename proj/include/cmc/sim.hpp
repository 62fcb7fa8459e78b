#ifndef CMC_SIM_HPP
#define CMC_SIM_HPP

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "cmc/selection.hpp"
#include "cmc/stats.hpp"

namespace cmc {

/// One Monte-Carlo scenario: sparse truth, design law, and the criteria
/// to score.
struct SimConfig {
  Family family = Family::gaussian;
  std::vector<int> n_grid;
  int p = 0;
  std::vector<double> beta_true;  // length p+1, intercept first
  double rho = 0.0;               // AR(1) design correlation
  double sigma = 1.0;             // gaussian noise sd
  int replications = 100;
  std::uint64_t seed = 0;
  std::vector<CompareMode> criteria;
  int max_size = -1;
  int threads = 0;

  ModelId true_model() const;
  int true_size() const { return true_model().size(); }

  void validate() const;
  static SimConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// Aggregated rates for one (n, criterion) cell.
struct CellMetrics {
  int n = 0;
  std::string criterion;                 // "cmc" / "aic" / ...
  std::string alpha_mode;                // "gamma=0.5", "alpha=0.1", "" for IC
  double exact_match_rate = 0.0;
  double false_active_rate = 0.0;
  double false_inactive_rate = 0.0;
  // Our definition: per-trial (#false actives + #false inactives)/p,
  // averaged over trials.  Reported in JSON only; the CSV schema is fixed.
  double misclassification_rate = 0.0;
  std::optional<double> coverage_freq;   // cmc only: lambda(true fit) <= T
  double capture_rate = 0.0;             // all M*_j, j >= p*, hold the truth
  double mean_size = 0.0;
  int failures = 0;
  int clamp_events = 0;
};

struct TrialMetrics {
  SimConfig config;
  std::vector<CellMetrics> cells;  // grouped by n, then criterion order

  nlohmann::json to_json() const;
  static TrialMetrics from_json(const nlohmann::json& j);
  std::string to_csv() const;
};

/// n x (p+1) design: intercept column plus rows drawn i.i.d. from a
/// zero-mean unit-variance AR(1) normal with corr(x_a, x_b) = rho^|a-b|.
Eigen::MatrixXd gen_design(int n, int p, double rho, RngStream& stream);

/// Response draw for the given family. Binomial/poisson linear
/// predictors are clamped to [-30, 30]; clamp_count reports how often.
Eigen::VectorXd gen_response(const Eigen::MatrixXd& X,
                             const std::vector<double>& beta_true,
                             Family family, double sigma, RngStream& stream,
                             int* clamp_count = nullptr);

TrialMetrics run_trials(const SimConfig& config);

/// Write the report to a file; format is "csv" or "json".
void emit_report(const TrialMetrics& metrics, const std::string& format,
                 const std::string& path);

}  // namespace cmc

#endif
