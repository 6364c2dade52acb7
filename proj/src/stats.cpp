#include "lcra/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lcra::stats {

namespace {

// Lower series: P(a,x) = x^a e^-x / Gamma(a) * sum_n x^n / (a(a+1)...(a+n)).
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < 10000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper continued fraction (modified Lentz): Q(a,x) = x^a e^-x / Gamma(a) * CF.
double gamma_q_contfrac(double a, double x) {
  const double fpmin = std::numeric_limits<double>::min() / 1e-30;
  double b = x + 1.0 - a;
  double c = 1.0 / fpmin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw std::invalid_argument("regularized_gamma_p: a must be positive");
  if (x < 0.0) throw std::domain_error("regularized_gamma_p: x must be non-negative");
  if (x == 0.0) return 0.0;
  // The series converges fast for x < a + 1, the continued fraction elsewhere.
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_contfrac(a, x);
}

double chi2_cdf(int dof, double x) {
  if (dof < 1) throw std::invalid_argument("chi2_cdf: dof must be >= 1");
  if (x < 0.0) throw std::domain_error("chi2_cdf: x must be non-negative");
  return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

double md_tail_bound(int T, double r) {
  if (T < 1) throw std::invalid_argument("md_tail_bound: T must be >= 1");
  if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("md_tail_bound: r must lie in (0, 1)");
  return std::exp(-0.5 * T * (1.0 - r));
}

double binomial_moment(int M, double rho, int order) {
  if (M < 0) throw std::invalid_argument("binomial_moment: M must be non-negative");
  if (!(rho >= 0.0 && rho <= 1.0))
    throw std::invalid_argument("binomial_moment: rho must lie in [0, 1]");
  if (order < 0) throw std::invalid_argument("binomial_moment: order must be non-negative");
  if (order == 0) return 1.0;
  if (rho == 0.0) return 0.0;
  if (rho == 1.0) return std::pow(static_cast<double>(M), order);
  const double lrho = std::log(rho);
  const double lq = std::log1p(-rho);
  double acc = 0.0;
  for (int m = 1; m <= M; ++m) {
    const double lpmf = std::lgamma(M + 1.0) - std::lgamma(m + 1.0) - std::lgamma(M - m + 1.0) +
                        m * lrho + (M - m) * lq;
    acc += std::pow(static_cast<double>(m), order) * std::exp(lpmf);
  }
  if (!std::isfinite(acc)) throw std::overflow_error("binomial_moment: overflow");
  return acc;
}

std::vector<MomentReport> random_sum_moments(int M, double rho, double sigma2, int k_max) {
  if (M < 0) throw std::invalid_argument("random_sum_moments: M must be non-negative");
  if (!(rho >= 0.0 && rho <= 1.0))
    throw std::invalid_argument("random_sum_moments: rho must lie in [0, 1]");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("random_sum_moments: sigma2 must be positive");
  if (k_max < 2 || k_max % 2 != 0 || k_max > 12)
    throw std::invalid_argument("random_sum_moments: k_max must be even and in [2, 12]");

  // Conditioned on B = m the sum is N(0, m sigma2), so even moments are
  // E[B^{k/2}] sigma^k (k-1)!!; the reference replaces E[B^{k/2}] by (M rho)^{k/2}.
  const double mean_b = static_cast<double>(M) * rho;
  const double ey2 = binomial_moment(M, rho, 1) * sigma2;
  const double ey4 = binomial_moment(M, rho, 2) * sigma2 * sigma2 * 3.0;
  const double kurt = ey2 > 0.0 ? ey4 / (ey2 * ey2) - 3.0 : 0.0;

  std::vector<MomentReport> out;
  out.reserve(k_max);
  for (int k = 1; k <= k_max; ++k) {
    MomentReport rep;
    rep.order = k;
    rep.excess_kurtosis = kurt;
    if (k % 2 == 0) {
      const int l = k / 2;
      double dfact = 1.0;  // (k-1)!!
      for (int j = k - 1; j > 1; j -= 2) dfact *= j;
      const double sig_k = std::pow(sigma2, l);
      rep.binom_moment = binomial_moment(M, rho, l);
      rep.random_sum = rep.binom_moment * sig_k * dfact;
      rep.reference = std::pow(mean_b, l) * sig_k * dfact;
      if (!std::isfinite(rep.random_sum) || !std::isfinite(rep.reference))
        throw std::overflow_error("random_sum_moments: overflow at k=" + std::to_string(k));
    }
    out.push_back(rep);
  }
  return out;
}

std::vector<double> random_sum_sample(int M, double rho, double sigma2, int n_samples,
                                      RandomStream& rng) {
  if (n_samples < 1) throw std::invalid_argument("random_sum_sample: n_samples must be >= 1");
  if (M < 0) throw std::invalid_argument("random_sum_sample: M must be non-negative");
  if (!(rho >= 0.0 && rho <= 1.0))
    throw std::invalid_argument("random_sum_sample: rho must lie in [0, 1]");
  const double sigma = std::sqrt(sigma2);
  std::vector<double> out(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    const int b = rng.binomial(M, rho);
    double y = 0.0;
    for (int j = 0; j < b; ++j) y += sigma * rng.gauss();
    out[i] = y;
  }
  return out;
}

}  // namespace lcra::stats
