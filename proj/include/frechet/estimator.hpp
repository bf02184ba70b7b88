#pragma once

#include <optional>

#include "frechet/space.hpp"

namespace frechet {

/// Sample Frechet mean in chart coordinates plus the sandwich covariance
/// Lambda^{-1} C Lambda^{-1} of sqrt(n) (nu_n - nu).
struct FrechetFit {
  Point mean;
  /// Chart centred at `mean`; every matrix below is expressed in it.
  ChartPtr chart;
  Vector chart_coords;
  std::size_t n = 0;
  int iterations = 0;
  double grad_norm = 0.0;
  MeanStrategy strategy = MeanStrategy::closed_form;

  // Populated by sandwich_covariance.
  bool has_covariance = false;
  Matrix lambda_n;
  Matrix c_n;
  Matrix asym_cov;
  bool lambda_positive_definite = false;
  double lambda_condition = 1.0;

  /// Estimated covariance of the chart coordinates of the mean, asym_cov / n.
  Matrix mean_covariance() const { return asym_cov / static_cast<double>(n); }
};

struct EstimateOptions {
  /// Overrides the space's default strategy.
  std::optional<MeanStrategy> strategy;
  double tolerance = 1e-10;
  int max_iterations = 200;
  DerivativeMode derivatives = DerivativeMode::automatic;
  DiffConfig diff;
  /// Newton with numeric derivatives cannot drive the gradient below the
  /// finite-difference noise. When the line search stalls, a residual below
  /// this floor still counts as converged.
  double numeric_floor = 1e-7;
};

/// Raised when an iterative strategy exhausts its budget; carries the last
/// iterate for diagnostics.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, Point last, int iterations, double grad_norm)
      : Error(ErrorKind::NoConvergence, message),
        last_(std::move(last)),
        iterations_(iterations),
        grad_norm_(grad_norm) {}

  const Point& last() const { return last_; }
  int iterations() const { return iterations_; }
  double grad_norm() const { return grad_norm_; }

 private:
  Point last_;
  int iterations_;
  double grad_norm_;
};

/// Stationary point of the empirical Frechet function, dispatched on the
/// space's strategy (closed form, exact open-book mean, Karcher iteration, or
/// damped Newton in chart coordinates).
FrechetFit estimate_mean(const Space& space, std::span<const Point> sample,
                         const EstimateOptions& options = {});

/// Fills Lambda_n = mean Hessian of h, C_n = mean outer product of the
/// gradients of h, and asym_cov = Lambda_n^{-1} C_n Lambda_n^{-1}, all at the
/// fitted chart coordinates. Throws NearSingularHessian when cond(Lambda_n)
/// exceeds 1e12.
FrechetFit sandwich_covariance(const Space& space, std::span<const Point> sample,
                               FrechetFit fit, const EstimateOptions& options = {});

/// estimate_mean followed by sandwich_covariance.
FrechetFit fit_frechet(const Space& space, std::span<const Point> sample,
                       const EstimateOptions& options = {});

/// n (nu_n - x)^T asym_cov^{-1} (nu_n - x).
double confidence_statistic(const FrechetFit& fit, const Vector& candidate_chart_coords);

/// True when the statistic is inside the (1 - alpha) chi-square ellipsoid;
/// the boundary is included.
bool within_chi2_region(double statistic, int dof, double alpha);

bool confidence_region_contains(const FrechetFit& fit, const Vector& candidate_chart_coords,
                                double alpha);

inline constexpr double kMaxConditionNumber = 1e12;

}  // namespace frechet
