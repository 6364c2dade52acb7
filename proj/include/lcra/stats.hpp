#pragma once

#include <vector>

#include "lcra/rng.hpp"

namespace lcra::stats {

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

// CDF of the chi-squared distribution with dof degrees of freedom.
// Throws std::invalid_argument for dof < 1, std::domain_error for x < 0.
double chi2_cdf(int dof, double x);

// Upper bound on P[chi2_{2T}/(2T) <= r] for r in (0, 1): exp(-T (1 - r) / 2).
// Throws std::invalid_argument unless T >= 1 and 0 < r < 1.
double md_tail_bound(int T, double r);

// Exact E[B^order] for B ~ Binomial(M, rho).
double binomial_moment(int M, double rho, int order);

// Moments of a random sum Y = sum_{i=1}^{B} x_i with B ~ Binomial(M, rho) and
// x_i iid real N(0, sigma2), against the fixed-population Gaussian reference
// Z ~ N(0, M rho sigma2). Odd moments vanish for both.
struct MomentReport {
  int order = 0;             // k
  double random_sum = 0.0;   // E[Y^k]
  double reference = 0.0;    // E[Z^k]
  double binom_moment = 0.0; // E[B^{k/2}] (0 for odd k)
  double excess_kurtosis = 0.0;
};

// Reports for k = 1..k_max; k_max must be even and <= 12.
std::vector<MomentReport> random_sum_moments(int M, double rho, double sigma2, int k_max);

// Draws of Y for the same random-sum model.
std::vector<double> random_sum_sample(int M, double rho, double sigma2, int n_samples,
                                      RandomStream& rng);

}  // namespace lcra::stats
