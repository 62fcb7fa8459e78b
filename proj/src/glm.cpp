#include "cmc/glm.hpp"

#include <cmath>

#include "cmc/error.hpp"
#include "cmc/stats.hpp"

namespace cmc {

namespace {

constexpr int kMaxIrlsIter = 50;
constexpr int kMaxHalvings = 10;
constexpr double kSeparationBound = 30.0;

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& X,
                               const std::vector<int>& cols) {
  Eigen::MatrixXd out(X.rows(), cols.size());
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(k) = X.col(cols[k]);
  return out;
}

void check_subdesign_rank(const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr,
                          const Dataset& data, const std::vector<int>& cols) {
  Eigen::VectorXd diag = qr.matrixR().diagonal().cwiseAbs();
  double dmax = diag.maxCoeff();
  for (int k = 0; k < diag.size(); ++k) {
    if (diag[k] <= 1e-10 * dmax) {
      std::string offenders;
      for (int j = k; j < diag.size(); ++j) {
        int col = cols[qr.colsPermutation().indices()[j]];
        if (!offenders.empty()) offenders += ", ";
        offenders += data.names()[col];
      }
      throw NumericError("singular design for submodel; offending columns: " +
                         offenders);
    }
  }
}

double stable_log1pexp(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double binomial_loglik(const Eigen::VectorXd& y, const Eigen::VectorXd& eta) {
  double ll = 0.0;
  for (int i = 0; i < y.size(); ++i) {
    ll += y[i] * eta[i] - stable_log1pexp(eta[i]);
  }
  return ll;
}

double poisson_loglik(const Eigen::VectorXd& y, const Eigen::VectorXd& eta) {
  double ll = 0.0;
  for (int i = 0; i < y.size(); ++i) {
    if (eta[i] > 700.0) throw NumericError("poisson linear predictor overflow");
    ll += y[i] * eta[i] - std::exp(eta[i]) - std::lgamma(y[i] + 1.0);
  }
  return ll;
}

double gaussian_profiled_loglik(int n, double rss) {
  return -0.5 * n * (std::log(2.0 * M_PI) + std::log(rss / n) + 1.0);
}

void check_degenerate_rss(double rss, const Eigen::VectorXd& y) {
  // Exact interpolation leaves RSS at the rounding floor (~eps^2 relative,
  // i.e. 1e-32); genuine near-noiseless data sits many orders above that.
  if (rss <= 1e-20 * std::max(1.0, y.squaredNorm())) {
    throw NumericError(
        "degenerate fit: residual sum of squares is zero (saturated "
        "interpolation); the profiled likelihood is unbounded");
  }
}

FitResult fit_gaussian(const Dataset& data, ModelId model,
                       const Eigen::MatrixXd& Xs,
                       const std::vector<int>& cols) {
  const int n = data.n();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
  check_subdesign_rank(qr, data, cols);
  Eigen::VectorXd b = qr.solve(data.y());
  Eigen::VectorXd r = data.y() - Xs * b;
  double rss = r.squaredNorm();
  check_degenerate_rss(rss, data.y());

  FitResult fit;
  fit.model = model;
  fit.beta = Eigen::VectorXd::Zero(data.p() + 1);
  for (std::size_t k = 0; k < cols.size(); ++k) fit.beta[cols[k]] = b[k];
  fit.rss = rss;
  fit.loglik = gaussian_profiled_loglik(n, rss);
  fit.deviance = rss;
  fit.iterations = 1;
  fit.converged = true;
  // Gradient of the profiled log-likelihood over included coordinates.
  fit.score_norm = ((n / rss) * (Xs.transpose() * r)).norm();
  fit.dataset_tag = data.tag();
  return fit;
}

FitResult fit_irls(const Dataset& data, ModelId model,
                   const Eigen::MatrixXd& Xs, const std::vector<int>& cols) {
  const int n = data.n();
  const bool binomial = data.family() == Family::binomial;
  const Eigen::VectorXd& y = data.y();

  {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xs);
    check_subdesign_rank(qr, data, cols);
  }

  auto loglik_at = [&](const Eigen::VectorXd& b) {
    Eigen::VectorXd eta = Xs * b;
    return binomial ? binomial_loglik(y, eta) : poisson_loglik(y, eta);
  };

  const int m = static_cast<int>(cols.size());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  double ybar = y.mean();
  if (binomial) {
    double pb = std::min(std::max(ybar, 1e-6), 1.0 - 1e-6);
    b[0] = std::log(pb / (1.0 - pb));
  } else {
    b[0] = std::log(std::max(ybar, 1e-6));
  }

  FitResult fit;
  fit.model = model;
  fit.dataset_tag = data.tag();

  double ll = loglik_at(b);
  int iter = 0;
  bool converged = false;
  for (; iter < kMaxIrlsIter; ++iter) {
    Eigen::VectorXd eta = Xs * b;
    Eigen::VectorXd mu(n), w(n);
    for (int i = 0; i < n; ++i) {
      if (binomial) {
        double p = 1.0 / (1.0 + std::exp(-eta[i]));
        mu[i] = p;
        w[i] = std::max(p * (1.0 - p), 1e-10);
      } else {
        double lam = std::exp(std::min(eta[i], 700.0));
        mu[i] = lam;
        w[i] = std::max(lam, 1e-10);
      }
    }
    Eigen::VectorXd score = Xs.transpose() * (y - mu);
    fit.score_norm = score.norm();
    if (fit.score_norm <= 1e-9 * std::max(1.0, std::fabs(ll))) {
      converged = true;
      break;
    }

    // Weighted least squares on the working response.
    Eigen::VectorXd sw = w.cwiseSqrt();
    Eigen::VectorXd z = eta + (y - mu).cwiseQuotient(w);
    Eigen::MatrixXd Xw = sw.asDiagonal() * Xs;
    Eigen::VectorXd zw = sw.asDiagonal() * z;
    Eigen::VectorXd b_new = Xw.householderQr().solve(zw);

    double ll_new = loglik_at(b_new);
    int halvings = 0;
    while ((!std::isfinite(ll_new) || ll_new < ll) && halvings < kMaxHalvings) {
      b_new = 0.5 * (b + b_new);
      ll_new = loglik_at(b_new);
      ++halvings;
    }
    if (!std::isfinite(ll_new)) break;
    b = b_new;
    ll = ll_new;
  }

  fit.beta = Eigen::VectorXd::Zero(data.p() + 1);
  for (std::size_t k = 0; k < cols.size(); ++k) fit.beta[cols[k]] = b[k];
  fit.loglik = ll;
  fit.iterations = iter;
  fit.converged = converged;
  // Under complete separation the score also vanishes as the coefficients
  // diverge, so a huge logit coefficient is a separation symptom even when
  // the score test passed; never report such a fit as converged.
  if (binomial && b.cwiseAbs().maxCoeff() > kSeparationBound) {
    fit.converged = false;
    fit.warnings.push_back(
        "possible complete separation: coefficient magnitude exceeds 30");
  } else if (!converged) {
    fit.warnings.push_back("IRLS did not converge in 50 iterations");
  }

  if (binomial) {
    fit.deviance = -2.0 * ll;  // saturated 0/1 log-likelihood is zero
  } else {
    double ll_sat = 0.0;
    for (int i = 0; i < n; ++i) {
      if (y[i] > 0.0) ll_sat += y[i] * std::log(y[i]) - y[i];
      ll_sat -= std::lgamma(y[i] + 1.0);
    }
    fit.deviance = 2.0 * (ll_sat - ll);
  }
  return fit;
}

}  // namespace

FitResult fit_submodel(const Dataset& data, ModelId model) {
  if (model.mask >= (1u << data.p())) {
    throw UsageError("model mask references predictors beyond p");
  }
  std::vector<int> cols = model.columns();
  Eigen::MatrixXd Xs = select_columns(data.X(), cols);
  if (data.family() == Family::gaussian) {
    return fit_gaussian(data, model, Xs, cols);
  }
  return fit_irls(data, model, Xs, cols);
}

double log_likelihood(const Dataset& data, const Eigen::VectorXd& beta) {
  if (beta.size() != data.p() + 1) {
    throw UsageError("beta must have length p+1");
  }
  if (!beta.allFinite()) throw NumericError("non-finite coefficient vector");
  Eigen::VectorXd eta = data.X() * beta;
  if (!eta.allFinite()) throw NumericError("non-finite linear predictor");
  switch (data.family()) {
    case Family::gaussian: {
      double rss = (data.y() - eta).squaredNorm();
      check_degenerate_rss(rss, data.y());
      return gaussian_profiled_loglik(data.n(), rss);
    }
    case Family::binomial:
      return binomial_loglik(data.y(), eta);
    case Family::poisson:
      return poisson_loglik(data.y(), eta);
  }
  return 0.0;
}

double wald_stat(const Dataset& data, const Eigen::VectorXd& beta,
                 const FitResult& full_fit) {
  if (data.family() != Family::gaussian) {
    throw UsageError("wald_stat is defined for the gaussian family only");
  }
  if (full_fit.dataset_tag != data.tag()) {
    throw UsageError("full_fit was computed on a different dataset");
  }
  const int n = data.n();
  const int m = data.p() + 1;
  double sigma2 = full_fit.rss / (n - m);
  if (sigma2 <= 0.0 || !std::isfinite(sigma2)) {
    throw NumericError("degenerate data: zero residual variance");
  }
  Eigen::VectorXd d = beta - full_fit.beta;
  Eigen::VectorXd Xd = data.X() * d;
  return Xd.squaredNorm() / sigma2;
}

}  // namespace cmc
