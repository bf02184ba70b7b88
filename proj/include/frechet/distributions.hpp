#pragma once

namespace frechet {

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
double regularized_gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double regularized_gamma_q(double a, double x);

/// Upper tail of chi-square with k degrees of freedom, Q(k/2, x/2).
double chi2_sf(double x, int k);
double chi2_cdf(double x, int k);
/// x such that chi2_cdf(x, k) = p.
double chi2_quantile(double p, int k);

double normal_cdf(double z);

}  // namespace frechet
