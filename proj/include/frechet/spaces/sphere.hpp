#pragma once

#include "frechet/space.hpp"

namespace frechet {

enum class SphereMetric { intrinsic, extrinsic };

/// Exp map of the unit sphere at `base`: cos|v| base + sin|v| v/|v|.
Vector sphere_exp(const Vector& base, const Vector& v);

/// Inverse of sphere_exp on the open geodesic ball of radius pi. Throws
/// CutLocus when |p + base| < 1e-9.
Vector sphere_log(const Vector& base, const Vector& p);

/// Great-circle distance, evaluated as 2 atan2(|p - q|, |p + q|) so that it
/// keeps full precision near 0 and pi.
double sphere_geodesic_distance(const Vector& p, const Vector& q);

/// Nearest point of the sphere to an ambient vector, m / |m|. Throws
/// NonUniqueProjection when |m| <= 1e-12.
Vector sphere_extrinsic_project(const Vector& m);

/// Orthonormal basis of the tangent space at `base`, as the columns of a
/// (d+1) x d matrix.
Matrix sphere_tangent_basis(const Vector& base);

/// Unit sphere S^d in R^{d+1}.
///
/// Intrinsic metric: geodesic distance; the chart at a base point is the log
/// map expressed in a fixed orthonormal tangent basis (normal coordinates).
/// Extrinsic metric: chordal distance of the inclusion into R^{d+1}; the chart
/// is the orthogonal projection onto the tangent plane at the base point,
/// defined on the open hemisphere around it.
class SphereSpace final : public Space {
 public:
  SphereSpace(int d, SphereMetric metric);

  PointKind kind() const override { return PointKind::sphere; }
  std::string name() const override;
  int chart_dim() const override { return d_; }
  double distance(const Point& a, const Point& b) const override;
  void validate(const Point& p) const override;
  ChartPtr chart_at(const Point& base) const override;
  MeanStrategy default_strategy() const override;
  Point closed_form_mean(std::span<const Point> sample) const override;
  Point initial_guess(std::span<const Point> sample) const override;

  SphereMetric metric() const { return metric_; }
  int intrinsic_dim() const { return d_; }

 private:
  int d_;
  SphereMetric metric_;
};

}  // namespace frechet
