#include "cmc/stats.hpp"

#include <cmath>
#include <limits>

#include "cmc/error.hpp"

namespace cmc {

double log_gamma(double x) {
  if (!(x > 0.0)) {
    throw NumericError("log_gamma: x must be positive");
  }
  return std::lgamma(x);
}

namespace {

// Lower incomplete gamma via power series, valid for x < a + 1.
double gamma_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < 1000; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper incomplete gamma Q(a,x) via Lentz continued fraction, x >= a + 1.
double gamma_cont_frac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double reg_gamma_lower(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) {
    throw NumericError("reg_gamma_lower: require a > 0 and x >= 0");
  }
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_series(a, x);
  double p = 1.0 - gamma_cont_frac(a, x);
  if (p < 0.0) p = 0.0;
  if (p > 1.0) p = 1.0;
  return p;
}

double chi2_cdf(double x, int df) {
  if (df < 1) throw NumericError("chi2_cdf: df must be >= 1");
  if (!(x >= 0.0)) throw NumericError("chi2_cdf: x must be >= 0");
  return reg_gamma_lower(0.5 * df, 0.5 * x);
}

double chi2_quantile(double q, int df) {
  if (df < 1) throw NumericError("chi2_quantile: df must be >= 1");
  if (!(q >= 0.0) || q >= 1.0) {
    throw NumericError("chi2_quantile: q must be in [0, 1)");
  }
  if (q == 0.0) return 0.0;

  // chi^2 density, used as the Newton derivative.
  auto pdf = [df](double x) {
    double a = 0.5 * df;
    return std::exp((a - 1.0) * std::log(x) - 0.5 * x - a * std::log(2.0) -
                    std::lgamma(a));
  };

  double lo = 0.0;
  double hi = df + 20.0 * std::sqrt(2.0 * df) + 200.0;
  while (chi2_cdf(hi, df) < q) hi *= 2.0;  // open the bracket if needed

  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 500; ++iter) {
    double f = chi2_cdf(x, df) - q;
    if (f > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    double d = pdf(x);
    // f/d stays well scaled even deep in the lower tail where both the
    // CDF gap and the density underflow toward zero together.
    double xn = (d > 0.0 && std::isfinite(f / d)) ? x - f / d : 0.5 * (lo + hi);
    if (!(xn > lo) || !(xn < hi)) xn = 0.5 * (lo + hi);
    if (std::fabs(xn - x) <= 1e-13 * std::max(1e-10, x)) {
      x = xn;
      break;
    }
    x = xn;
  }
  return x;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed) {
  // Mix (seed, stream_id) into the xoshiro state via splitmix64.
  std::uint64_t sm = seed ^ (0x6a09e667f3bcc909ULL * (stream_id + 1));
  for (auto& word : s_) word = splitmix64(sm);
}

RngStream RngStream::substream(std::uint64_t stream_id) const {
  std::uint64_t child_seed = seed_ ^ rotl(stream_id + 0x9e3779b97f4a7c15ULL, 17);
  return RngStream(child_seed, stream_id);
}

std::uint64_t RngStream::next_u64() {
  // xoshiro256++
  std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform() {
  // 53-bit mantissa in (0,1); never returns exactly 0.
  double u = (next_u64() >> 11) * 0x1.0p-53;
  return u > 0.0 ? u : 0x1.0p-53;
}

double RngStream::standard_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_normal_ = true;
  return r * std::cos(theta);
}

int RngStream::bernoulli(double p) {
  if (!(p >= 0.0) || !(p <= 1.0)) {
    throw NumericError("bernoulli: p must be in [0, 1]");
  }
  if (p == 0.0) return 0;
  if (p == 1.0) return 1;
  return uniform() < p ? 1 : 0;
}

long RngStream::poisson(double mu) {
  if (!(mu > 0.0)) throw NumericError("poisson: mu must be positive");
  if (mu < 30.0) {
    // Knuth multiplication method.
    double limit = std::exp(-mu);
    double prod = uniform();
    long k = 0;
    while (prod > limit) {
      prod *= uniform();
      ++k;
    }
    return k;
  }
  // PTRS transformed rejection (Hormann 1993).
  double smu = std::sqrt(mu);
  double b = 0.931 + 2.53 * smu;
  double a = -0.059 + 0.02483 * b;
  double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  double v_r = 0.9277 - 3.6224 / (b - 2.0);
  double log_mu = std::log(mu);
  for (;;) {
    double u = uniform() - 0.5;
    double v = uniform();
    double us = 0.5 - std::fabs(u);
    double k = std::floor((2.0 * a / us + b) * u + mu + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        k * log_mu - mu - std::lgamma(k + 1.0)) {
      return static_cast<long>(k);
    }
  }
}

}  // namespace cmc
