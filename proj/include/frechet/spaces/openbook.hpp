#pragma once

#include <vector>

#include "frechet/space.hpp"

namespace frechet {

/// Empirical (or population) moments that decide where the open-book mean
/// lives.
struct OpenBookMoments {
  int leaves = 0;
  int spine_dim = 0;
  std::size_t n = 0;
  /// Fraction of the sample on leaf k (index k-1).
  std::vector<double> weights;
  double spine_fraction = 0.0;
  /// Mean of the zero-th coordinate after folding onto leaf k (index k-1).
  std::vector<double> folded_means;
  /// Mean of (x1..xD) over every point.
  Vector spine_mean;
};

struct OpenBookClass {
  enum class Kind { leaf, spine, boundary };
  Kind kind = Kind::spine;
  /// Leaf index for leaf and boundary; 0 for spine.
  int leaf = 0;

  friend bool operator==(const OpenBookClass&, const OpenBookClass&) = default;
};

/// Folding map onto leaf k: identity on leaf k and on the spine, reflection
/// x0 -> -x0 for points on the other leaves.
Vector openbook_fold(int k, const Point& p);

OpenBookMoments openbook_moments(std::span<const Point> sample, int leaves);

/// leaf(k) if m_k > 0; spine if every m_k < 0; boundary(k) if the largest
/// m_k is exactly 0.
OpenBookClass openbook_classify(const OpenBookMoments& moments);

/// Exact sample Frechet mean: (k; m_k, mu_1D) when m_k > 0 for some k,
/// otherwise the spine point (0; 0, mu_1D).
Point openbook_frechet_mean(std::span<const Point> sample, int leaves);

/// K half-spaces R^D x [0, inf) glued along the common spine R^D.
///
/// Within a leaf (or between a leaf and the spine) the distance is Euclidean;
/// between different leaves it is |x - R y| with R the reflection across the
/// spine. The chart at a point on leaf k is the leaf's own coordinate system
/// (s = D + 1); at a spine point it is the spine (s = D).
class OpenBookSpace final : public Space {
 public:
  OpenBookSpace(int leaves, int spine_dim);

  PointKind kind() const override { return PointKind::openbook; }
  std::string name() const override;
  int chart_dim() const override { return spine_dim_ + 1; }
  double distance(const Point& a, const Point& b) const override;
  void validate(const Point& p) const override;
  ChartPtr chart_at(const Point& base) const override;
  MeanStrategy default_strategy() const override { return MeanStrategy::openbook_exact; }
  Point closed_form_mean(std::span<const Point> sample) const override;
  Point initial_guess(std::span<const Point> sample) const override;

  int leaves() const { return leaves_; }
  int spine_dim() const { return spine_dim_; }

 private:
  int leaves_;
  int spine_dim_;
};

double openbook_distance(const Point& a, const Point& b);

}  // namespace frechet
