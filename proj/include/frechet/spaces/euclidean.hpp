#pragma once

#include "frechet/space.hpp"

namespace frechet {

/// R^s with the Euclidean distance; the chart is the identity.
class EuclideanSpace final : public Space {
 public:
  explicit EuclideanSpace(int dim);

  PointKind kind() const override { return PointKind::euclidean; }
  std::string name() const override;
  int chart_dim() const override { return dim_; }
  double distance(const Point& a, const Point& b) const override;
  void validate(const Point& p) const override;
  ChartPtr chart_at(const Point& base) const override;
  MeanStrategy default_strategy() const override { return MeanStrategy::closed_form; }
  Point closed_form_mean(std::span<const Point> sample) const override;
  Point initial_guess(std::span<const Point> sample) const override;

 private:
  int dim_;
};

}  // namespace frechet
