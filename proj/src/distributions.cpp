#include "frechet/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "frechet/error.hpp"

namespace frechet {
namespace {

constexpr int kMaxTerms = 100000;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;

// log of x^a e^-x / Gamma(a)
double log_prefactor(double a, double x) { return a * std::log(x) - x - std::lgamma(a); }

// P(a, x) by the power series, valid for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 0; n < kMaxTerms; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(log_prefactor(a, x));
}

// Q(a, x) by the continued fraction (modified Lentz), valid for x >= a + 1.
double gamma_q_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxTerms; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(log_prefactor(a, x)) * h;
}

void check_arguments(double a, double x) {
  if (!(a > 0.0)) throw Error(ErrorKind::InvalidArgument, "incomplete gamma needs a > 0");
  if (!(x >= 0.0)) throw Error(ErrorKind::InvalidArgument, "incomplete gamma needs x >= 0");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  check_arguments(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  check_arguments(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_fraction(a, x);
}

double chi2_sf(double x, int k) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "chi-square needs k >= 1");
  if (!(x >= 0.0)) throw Error(ErrorKind::InvalidArgument, "chi-square needs x >= 0");
  return regularized_gamma_q(0.5 * k, 0.5 * x);
}

double chi2_cdf(double x, int k) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "chi-square needs k >= 1");
  if (!(x >= 0.0)) throw Error(ErrorKind::InvalidArgument, "chi-square needs x >= 0");
  return regularized_gamma_p(0.5 * k, 0.5 * x);
}

double chi2_quantile(double p, int k) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "chi-square needs k >= 1");
  if (!(p >= 0.0 && p < 1.0)) throw Error(ErrorKind::InvalidArgument, "quantile needs p in [0, 1)");
  if (p == 0.0) return 0.0;
  // Bisection on the upper tail keeps accuracy for p close to 1.
  const double tail = 1.0 - p;
  double lo = 0.0;
  double hi = std::max(1.0, static_cast<double>(k));
  while (chi2_sf(hi, k) > tail) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > 4.0 * kEps * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (chi2_sf(mid, k) > tail)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace frechet
