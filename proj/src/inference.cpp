#include "frechet/inference.hpp"

#include <algorithm>
#include <numeric>

#include "frechet/estimator.hpp"

namespace frechet {
namespace {

Vector column_mean(std::span<const Vector> rows) {
  Vector sum = Vector::Zero(rows.front().size());
  for (const Vector& r : rows) sum += r;
  return sum / static_cast<double>(rows.size());
}

Matrix unbiased_covariance(std::span<const Vector> rows, const Vector& mean) {
  Matrix sum = Matrix::Zero(mean.size(), mean.size());
  for (const Vector& r : rows) {
    const Vector d = r - mean;
    sum += d * d.transpose();
  }
  return sum / static_cast<double>(rows.size() - 1);
}

std::vector<std::size_t> ascending_order(std::span<const double> pvalues) {
  std::vector<std::size_t> order(pvalues.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });
  return order;
}

void check_pvalues(std::span<const double> pvalues, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
  for (double p : pvalues)
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidArgument, "p-value outside [0, 1]");
}

MultiTestResult sorted_result(std::span<const double> pvalues, double alpha, MultiTestMethod method) {
  MultiTestResult out;
  out.method = method;
  out.alpha = alpha;
  out.order = ascending_order(pvalues);
  for (std::size_t i : out.order) out.sorted_p.push_back(pvalues[i]);
  out.rejected.assign(pvalues.size(), false);
  return out;
}

}  // namespace

TwoSampleResult two_sample_test_vectors(std::span<const Vector> x, std::span<const Vector> y) {
  if (x.empty() || y.empty()) throw Error(ErrorKind::InvalidArgument, "both samples must be nonempty");
  const Eigen::Index s = x.front().size();
  for (const Vector& v : x)
    if (v.size() != s) throw Error(ErrorKind::InvalidArgument, "chart vectors differ in length");
  for (const Vector& v : y)
    if (v.size() != s) throw Error(ErrorKind::InvalidArgument, "chart vectors differ in length");
  if (x.size() < 2 || y.size() < 2 ||
      x.size() + y.size() < static_cast<std::size_t>(s) + 2)
    throw Error(ErrorKind::InvalidArgument, "samples too small for the covariance estimate");

  TwoSampleResult out;
  out.dof = static_cast<int>(s);
  out.n1 = x.size();
  out.n2 = y.size();
  out.mean_x = column_mean(x);
  out.mean_y = column_mean(y);
  out.pooled_cov = symmetrize(unbiased_covariance(x, out.mean_x) / static_cast<double>(out.n1) +
                              unbiased_covariance(y, out.mean_y) / static_cast<double>(out.n2));
  const SymmetricInverse inv =
      symmetric_inverse(out.pooled_cov, kMaxConditionNumber, ErrorKind::NearSingularCovariance);
  const Vector diff = out.mean_x - out.mean_y;
  out.statistic = std::max(0.0, diff.dot(inv.inverse * diff));
  out.p_value = chi2_sf(out.statistic, out.dof);
  return out;
}

TwoSampleResult two_sample_test(const Space& space, std::span<const Point> x,
                                std::span<const Point> y) {
  if (x.empty() || y.empty()) throw Error(ErrorKind::InvalidArgument, "both samples must be nonempty");
  space.validate_all(x);
  space.validate_all(y);
  std::vector<Point> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  const ChartPtr chart = estimate_mean(space, pooled).chart;

  std::vector<Vector> cx;
  std::vector<Vector> cy;
  cx.reserve(x.size());
  cy.reserve(y.size());
  for (const Point& p : x) cx.push_back(chart->forward(p));
  for (const Point& p : y) cy.push_back(chart->forward(p));
  return two_sample_test_vectors(cx, cy);
}

MultiTestResult bonferroni(std::span<const double> pvalues, double alpha) {
  check_pvalues(pvalues, alpha);
  MultiTestResult out = sorted_result(pvalues, alpha, MultiTestMethod::bonferroni);
  if (pvalues.empty()) return out;
  const double m = static_cast<double>(pvalues.size());
  out.global_p = std::min(1.0, m * out.sorted_p.front());
  for (std::size_t i = 0; i < pvalues.size(); ++i) {
    out.rejected[i] = pvalues[i] <= alpha / m;
    if (out.rejected[i]) ++out.rejections;
  }
  return out;
}

MultiTestResult bh_fdr(std::span<const double> pvalues, double alpha) {
  check_pvalues(pvalues, alpha);
  MultiTestResult out = sorted_result(pvalues, alpha, MultiTestMethod::bh);
  const std::size_t m = pvalues.size();
  if (m == 0) return out;
  out.global_p = std::min(1.0, static_cast<double>(m) * out.sorted_p.front());
  std::size_t cutoff = 0;
  for (std::size_t i = m; i >= 1; --i) {
    if (out.sorted_p[i - 1] <= static_cast<double>(i) * alpha / static_cast<double>(m)) {
      cutoff = i;
      break;
    }
  }
  for (std::size_t i = 0; i < cutoff; ++i) out.rejected[out.order[i]] = true;
  out.rejections = cutoff;
  return out;
}

}  // namespace frechet
