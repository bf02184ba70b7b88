#pragma once

#include <vector>

#include "frechet/distributions.hpp"
#include "frechet/space.hpp"

namespace frechet {

struct TwoSampleResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  Vector mean_x;
  Vector mean_y;
  /// Sigma_X / n1 + Sigma_Y / n2, group covariances with n - 1 denominators.
  Matrix pooled_cov;
};

/// T = (Xbar - Ybar)^T Sigma^{-1} (Xbar - Ybar) on chart vectors, referred to
/// chi-square with s degrees of freedom. Throws NearSingularCovariance when
/// cond(Sigma) exceeds 1e12.
TwoSampleResult two_sample_test_vectors(std::span<const Vector> x, std::span<const Vector> y);

/// Charts both samples with the same chart (the space's chart at the pooled
/// sample mean; global for SPD) and runs two_sample_test_vectors.
TwoSampleResult two_sample_test(const Space& space, std::span<const Point> x,
                                std::span<const Point> y);

enum class MultiTestMethod { bonferroni, bh };

struct MultiTestResult {
  MultiTestMethod method = MultiTestMethod::bh;
  double alpha = 0.05;
  /// Site indices sorted by ascending p-value, ties by index.
  std::vector<std::size_t> order;
  std::vector<double> sorted_p;
  /// Per site, in the original order.
  std::vector<bool> rejected;
  std::size_t rejections = 0;
  /// min(1, m * min p); only meaningful for bonferroni.
  double global_p = 1.0;
};

MultiTestResult bonferroni(std::span<const double> pvalues, double alpha = 0.05);

/// Benjamini-Hochberg step-up: reject the i smallest p-values for the largest
/// i with p_(i) <= i alpha / m.
MultiTestResult bh_fdr(std::span<const double> pvalues, double alpha = 0.05);

}  // namespace frechet
