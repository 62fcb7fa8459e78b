#ifndef CMC_GLM_HPP
#define CMC_GLM_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cmc/data.hpp"

namespace cmc {

/// Maximum-likelihood fit of one submodel. Coefficients live in the full
/// (p+1)-vector with exact zeros at excluded positions.
struct FitResult {
  ModelId model;
  Eigen::VectorXd beta;  // length p+1
  double loglik = 0.0;
  double deviance = 0.0;
  double rss = 0.0;  // gaussian only
  int iterations = 0;
  bool converged = false;
  double score_norm = 0.0;
  std::uint64_t dataset_tag = 0;
  std::vector<std::string> warnings;
};

/// Fit the submodel given by `model` (intercept always included).
/// Gaussian: exact least squares via Householder QR with the profiled
/// log-likelihood -(n/2)[ln(2pi) + ln(RSS/n) + 1]. Binomial/poisson:
/// IRLS with step-halving.
FitResult fit_submodel(const Dataset& data, ModelId model);

/// Log-likelihood at an arbitrary coefficient vector. Gaussian uses the
/// profiled variance RSS(beta)/n.
double log_likelihood(const Dataset& data, const Eigen::VectorXd& beta);

/// Wald statistic W = (beta - beta_hat)' X'X (beta - beta_hat) / s^2
/// with s^2 = RSS_full / (n - p - 1). Gaussian only.
double wald_stat(const Dataset& data, const Eigen::VectorXd& beta,
                 const FitResult& full_fit);

}  // namespace cmc

#endif
