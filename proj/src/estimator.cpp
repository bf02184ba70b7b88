#include "frechet/estimator.hpp"

#include <cmath>
#include <limits>

#include "frechet/distributions.hpp"

namespace frechet {
namespace {

double chart_objective(const Chart& chart, const Vector& x, std::span<const Point> sample) {
  double total = 0.0;
  for (const Point& q : sample) total += chart.h(x, q);
  return total / static_cast<double>(sample.size());
}

Vector mean_gradient(const Chart& chart, const Vector& x, std::span<const Point> sample,
                     const EstimateOptions& options) {
  Vector sum = Vector::Zero(chart.dim());
  for (const Point& q : sample) sum += chart.grad_h(x, q, options.derivatives, options.diff);
  return sum / static_cast<double>(sample.size());
}

Matrix mean_hessian(const Chart& chart, const Vector& x, std::span<const Point> sample,
                    const EstimateOptions& options) {
  Matrix sum = Matrix::Zero(chart.dim(), chart.dim());
  for (const Point& q : sample) sum += chart.hess_h(x, q, options.derivatives, options.diff);
  return symmetrize(sum / static_cast<double>(sample.size()));
}

// Fixed point mu <- phi^{-1}((1 - tau) phi(mu) + tau mean phi(Y_j)) with the
// chart re-centred at every iterate. For the sphere's log chart this is the
// Karcher step Exp_mu(tau mean Log_mu Y_j), and 2 |mean Log_mu Y_j| is the
// exact gradient norm of F_n in normal coordinates.
FrechetFit karcher(const Space& space, std::span<const Point> sample,
                   const EstimateOptions& options) {
  Point current = space.initial_guess(sample);
  double current_value = frechet_value(space, sample, current);
  double residual = std::numeric_limits<double>::infinity();
  int iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    const ChartPtr chart = space.chart_at(current);
    const Vector origin = chart->forward(current);
    Vector step = Vector::Zero(chart->dim());
    for (const Point& q : sample) step += chart->forward(q) - origin;
    step /= static_cast<double>(sample.size());
    residual = 2.0 * step.norm();
    if (residual <= options.tolerance) break;

    // Increases within rounding of F_n do not count; near the optimum they
    // would otherwise shrink tau to nothing and stall the iteration.
    const double slack = 64.0 * std::numeric_limits<double>::epsilon() * current_value;
    double tau = 1.0;
    Point candidate = chart->inverse(origin + tau * step);
    double candidate_value = frechet_value(space, sample, candidate);
    for (int halving = 0; candidate_value > current_value + slack && halving < 30; ++halving) {
      tau *= 0.5;
      candidate = chart->inverse(origin + tau * step);
      candidate_value = frechet_value(space, sample, candidate);
    }
    current = std::move(candidate);
    current_value = candidate_value;
  }
  if (!(residual <= options.tolerance))
    throw ConvergenceError("Karcher iteration did not converge", current, iter, residual);

  FrechetFit fit;
  fit.mean = current;
  fit.iterations = iter;
  fit.grad_norm = residual;
  fit.strategy = MeanStrategy::karcher;
  return fit;
}

// Damped Newton in the chart at the initial guess. Negative or tiny Hessian
// eigenvalues are reflected and floored so the step is always a descent
// direction; the step is halved until F_n decreases.
FrechetFit newton(const Space& space, std::span<const Point> sample,
                  const EstimateOptions& options) {
  const Point start = space.initial_guess(sample);
  const ChartPtr chart = space.chart_at(start);
  Vector x = chart->forward(start);
  double value = chart_objective(*chart, x, sample);
  double residual = std::numeric_limits<double>::infinity();
  int iter = 0;
  bool converged = false;
  for (; iter < options.max_iterations; ++iter) {
    const Vector grad = mean_gradient(*chart, x, sample, options);
    residual = grad.norm();
    if (residual <= options.tolerance) {
      converged = true;
      break;
    }
    const SymmetricEigen eig = jacobi_eigen(mean_hessian(*chart, x, sample, options));
    const double top = std::max(eig.values.cwiseAbs().maxCoeff(), 1e-300);
    const Vector step = -spectral_map(eig, [top](double l) {
                          return 1.0 / std::max(std::abs(l), 1e-8 * top);
                        }) * grad;

    double t = 1.0;
    bool improved = false;
    for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
      const Vector trial = x + t * step;
      const double trial_value = chart_objective(*chart, trial, sample);
      if (trial_value < value) {
        x = trial;
        value = trial_value;
        improved = true;
        break;
      }
    }
    if (!improved) {
      converged = residual <= options.numeric_floor;
      break;
    }
  }
  if (!converged)
    throw ConvergenceError("Newton iteration did not converge", chart->inverse(x), iter, residual);

  FrechetFit fit;
  fit.mean = chart->inverse(x);
  fit.iterations = iter;
  fit.grad_norm = residual;
  fit.strategy = MeanStrategy::newton;
  return fit;
}

}  // namespace

FrechetFit estimate_mean(const Space& space, std::span<const Point> sample,
                         const EstimateOptions& options) {
  if (sample.empty()) throw Error(ErrorKind::InvalidArgument, "empty sample");
  space.validate_all(sample);

  const MeanStrategy strategy = options.strategy.value_or(space.default_strategy());
  FrechetFit fit;
  switch (strategy) {
    case MeanStrategy::openbook_exact:
      if (space.kind() != PointKind::openbook)
        throw Error(ErrorKind::InvalidArgument, "openbook_exact needs an open book space");
      [[fallthrough]];
    case MeanStrategy::closed_form:
      fit.mean = space.closed_form_mean(sample);
      fit.strategy = strategy;
      break;
    case MeanStrategy::karcher:
      fit = karcher(space, sample, options);
      break;
    case MeanStrategy::newton:
      fit = newton(space, sample, options);
      break;
  }
  fit.n = sample.size();
  fit.chart = space.chart_at(fit.mean);
  fit.chart_coords = fit.chart->forward(fit.mean);
  if (strategy == MeanStrategy::closed_form || strategy == MeanStrategy::openbook_exact)
    fit.grad_norm = mean_gradient(*fit.chart, fit.chart_coords, sample, options).norm();
  return fit;
}

FrechetFit sandwich_covariance(const Space& space, std::span<const Point> sample,
                               FrechetFit fit, const EstimateOptions& options) {
  if (sample.empty()) throw Error(ErrorKind::InvalidArgument, "empty sample");
  space.validate_all(sample);
  if (!fit.chart) {
    fit.chart = space.chart_at(fit.mean);
    fit.chart_coords = fit.chart->forward(fit.mean);
  }
  const int s = fit.chart->dim();
  const double n = static_cast<double>(sample.size());
  Matrix lambda = Matrix::Zero(s, s);
  Matrix c = Matrix::Zero(s, s);
  for (const Point& q : sample) {
    const Vector g = fit.chart->grad_h(fit.chart_coords, q, options.derivatives, options.diff);
    lambda += fit.chart->hess_h(fit.chart_coords, q, options.derivatives, options.diff);
    c += g * g.transpose();
  }
  fit.lambda_n = symmetrize(lambda / n);
  fit.c_n = symmetrize(c / n);
  const SymmetricInverse inv =
      symmetric_inverse(fit.lambda_n, kMaxConditionNumber, ErrorKind::NearSingularHessian);
  fit.asym_cov = symmetrize(inv.inverse * fit.c_n * inv.inverse);
  fit.lambda_positive_definite = inv.positive_definite;
  fit.lambda_condition = inv.condition;
  fit.n = sample.size();
  fit.has_covariance = true;
  return fit;
}

FrechetFit fit_frechet(const Space& space, std::span<const Point> sample,
                       const EstimateOptions& options) {
  return sandwich_covariance(space, sample, estimate_mean(space, sample, options), options);
}

double confidence_statistic(const FrechetFit& fit, const Vector& candidate) {
  if (!fit.has_covariance)
    throw Error(ErrorKind::InvalidArgument, "fit has no covariance; run sandwich_covariance");
  if (candidate.size() != fit.chart_coords.size())
    throw Error(ErrorKind::InvalidArgument, "candidate has wrong chart dimension");
  if (candidate.size() == 0) return 0.0;
  const Vector diff = fit.chart_coords - candidate;
  const SymmetricInverse inv =
      symmetric_inverse(fit.asym_cov, kMaxConditionNumber, ErrorKind::NearSingularCovariance);
  return static_cast<double>(fit.n) * diff.dot(inv.inverse * diff);
}

bool within_chi2_region(double statistic, int dof, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
  if (dof == 0) return statistic <= 0.0;
  return statistic <= chi2_quantile(1.0 - alpha, dof);
}

bool confidence_region_contains(const FrechetFit& fit, const Vector& candidate, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
  if (candidate.size() == 0 && fit.chart_coords.size() == 0) return true;
  if (candidate == fit.chart_coords) return true;
  return within_chi2_region(confidence_statistic(fit, candidate),
                            static_cast<int>(candidate.size()), alpha);
}

}  // namespace frechet
