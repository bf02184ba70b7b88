#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "frechet/diff.hpp"
#include "frechet/point.hpp"

namespace frechet {

enum class MeanStrategy { newton, karcher, closed_form, openbook_exact };

std::string_view to_string(MeanStrategy strategy);

/// `automatic` uses a chart's analytic derivatives when it has them.
enum class DerivativeMode { automatic, numeric };

/// A coordinate chart phi : G -> U in R^s together with the squared-distance
/// function h(x; q) = rho^2(phi^{-1}(x), q) and its derivatives in x.
class Chart {
 public:
  virtual ~Chart() = default;

  virtual int dim() const = 0;
  virtual Vector forward(const Point& p) const = 0;
  virtual Point inverse(const Vector& x) const = 0;
  virtual double h(const Vector& x, const Point& q) const = 0;

  virtual bool has_analytic_derivatives() const { return false; }
  virtual Vector analytic_grad_h(const Vector& x, const Point& q) const;
  virtual Matrix analytic_hess_h(const Vector& x, const Point& q) const;

  Vector grad_h(const Vector& x, const Point& q, DerivativeMode mode = DerivativeMode::automatic,
                const DiffConfig& cfg = {}) const;
  Matrix hess_h(const Vector& x, const Point& q, DerivativeMode mode = DerivativeMode::automatic,
                const DiffConfig& cfg = {}) const;
};

using ChartPtr = std::shared_ptr<const Chart>;

/// A metric space of one point kind with per-base-point charts.
class Space {
 public:
  virtual ~Space() = default;

  virtual PointKind kind() const = 0;
  virtual std::string name() const = 0;
  /// Chart dimension of the top stratum.
  virtual int chart_dim() const = 0;
  virtual double distance(const Point& a, const Point& b) const = 0;
  /// Throws MixedSpacePoints for a point of another kind, InvalidPoint for a
  /// point of the right kind but wrong shape.
  virtual void validate(const Point& p) const = 0;

  /// Chart around `base`, used at the estimated mean.
  virtual ChartPtr chart_at(const Point& base) const = 0;

  virtual MeanStrategy default_strategy() const = 0;
  /// Exact sample mean where one exists; throws InvalidArgument otherwise.
  virtual Point closed_form_mean(std::span<const Point> sample) const;
  /// Starting point for iterative strategies.
  virtual Point initial_guess(std::span<const Point> sample) const = 0;

  void validate_all(std::span<const Point> sample) const;
};

/// sum_j w_j rho^2(p, Y_j).
double frechet_value(const Space& space, std::span<const Point> sample,
                     std::span<const double> weights, const Point& p);
/// Uniform weights 1/n.
double frechet_value(const Space& space, std::span<const Point> sample, const Point& p);

}  // namespace frechet
