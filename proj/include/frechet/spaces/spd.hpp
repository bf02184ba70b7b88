#pragma once

#include "frechet/space.hpp"

namespace frechet {

enum class SpdMetric { euclidean, log_euclidean };

/// Matrix logarithm of an SPD matrix through its eigendecomposition. Throws
/// NotPositiveDefinite when the smallest eigenvalue is <= 1e-14 times the
/// largest, InvalidPoint when the input is not symmetric within 1e-12.
Matrix spd_logm(const Matrix& a);

/// Matrix exponential of a symmetric matrix.
Matrix spd_expm(const Matrix& b);

/// Isometric vectorization of a symmetric p x p matrix into R^{p(p+1)/2}:
/// the diagonal first, then the upper off-diagonal entries in row-major order
/// scaled by sqrt(2), so |vech(B)| equals the Frobenius norm of B.
Vector spd_vech(const Matrix& b);
Matrix spd_unvech(const Vector& v);

/// Euclidean: entrywise mean. Log-Euclidean: expm of the mean matrix log.
Matrix spd_mean(std::span<const Point> sample, SpdMetric metric);

/// Symmetric positive definite p x p matrices.
///
/// The Euclidean metric is the Frobenius distance |A - B|_F = sqrt(trace((A-B)^2));
/// the log-Euclidean metric is |logm(A) - logm(B)|_F. In both cases the chart
/// is global: vech for the Euclidean metric, vech of logm for the
/// log-Euclidean one. Both charts are isometries onto (an open subset of)
/// R^{p(p+1)/2}, so h(x; q) = |x - phi(q)|^2 exactly.
class SpdSpace final : public Space {
 public:
  SpdSpace(int p, SpdMetric metric);

  PointKind kind() const override { return PointKind::spd; }
  std::string name() const override;
  int chart_dim() const override { return p_ * (p_ + 1) / 2; }
  double distance(const Point& a, const Point& b) const override;
  void validate(const Point& p) const override;
  ChartPtr chart_at(const Point& base) const override;
  MeanStrategy default_strategy() const override { return MeanStrategy::closed_form; }
  Point closed_form_mean(std::span<const Point> sample) const override;
  Point initial_guess(std::span<const Point> sample) const override;

  SpdMetric metric() const { return metric_; }
  int matrix_size() const { return p_; }

  /// The chart vector of a point; the same map as chart_at(..)->forward.
  Vector chart_vector(const Point& p) const;

 private:
  int p_;
  SpdMetric metric_;
};

}  // namespace frechet
