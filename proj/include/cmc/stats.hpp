#ifndef CMC_STATS_HPP
#define CMC_STATS_HPP

#include <cstdint>

namespace cmc {

/// ln Gamma(x) for x > 0. Throws NumericError outside the domain.
double log_gamma(double x);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
/// Series expansion for x < a + 1, continued fraction otherwise.
double reg_gamma_lower(double a, double x);

/// P(chi^2_df <= x).
double chi2_cdf(double x, int df);

/// Inverse of chi2_cdf in x for q in [0, 1). Bracketed Newton with
/// bisection fallback.
double chi2_quantile(double q, int df);

/// Seeded random stream. Sub-streams derived from (seed, stream id) are
/// independent for simulation purposes. The contract is reproducibility:
/// equal (seed, id) gives an identical draw sequence on every run.
class RngStream {
public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  /// Derive a child stream; disjoint from this stream and from children
  /// with other ids.
  RngStream substream(std::uint64_t stream_id) const;

  std::uint64_t next_u64();

  /// Uniform on (0, 1).
  double uniform();

  /// Standard normal (Box-Muller, cached pair).
  double standard_normal();

  /// Bernoulli(p), p in [0, 1].
  int bernoulli(double p);

  /// Poisson(mu), mu > 0. Knuth multiplication for small means, PTRS
  /// transformed rejection for large ones.
  long poisson(double mu);

private:
  std::uint64_t s_[4];  // xoshiro256++ state
  std::uint64_t seed_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace cmc

#endif
