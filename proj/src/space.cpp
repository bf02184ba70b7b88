#include "frechet/space.hpp"

#include <cmath>

namespace frechet {

std::string_view to_string(MeanStrategy strategy) {
  switch (strategy) {
    case MeanStrategy::newton: return "newton";
    case MeanStrategy::karcher: return "karcher";
    case MeanStrategy::closed_form: return "closed_form";
    case MeanStrategy::openbook_exact: return "openbook_exact";
  }
  return "unknown";
}

Vector Chart::analytic_grad_h(const Vector&, const Point&) const {
  throw Error(ErrorKind::InvalidArgument, "chart has no analytic gradient");
}

Matrix Chart::analytic_hess_h(const Vector&, const Point&) const {
  throw Error(ErrorKind::InvalidArgument, "chart has no analytic Hessian");
}

Vector Chart::grad_h(const Vector& x, const Point& q, DerivativeMode mode,
                     const DiffConfig& cfg) const {
  if (mode == DerivativeMode::automatic && has_analytic_derivatives())
    return analytic_grad_h(x, q);
  return numeric_gradient([&](const Vector& y) { return h(y, q); }, x, cfg);
}

Matrix Chart::hess_h(const Vector& x, const Point& q, DerivativeMode mode,
                     const DiffConfig& cfg) const {
  if (mode == DerivativeMode::automatic && has_analytic_derivatives())
    return analytic_hess_h(x, q);
  return numeric_hessian([&](const Vector& y) { return h(y, q); }, x, cfg);
}

Point Space::closed_form_mean(std::span<const Point>) const {
  throw Error(ErrorKind::InvalidArgument, name() + " has no closed-form mean");
}

void Space::validate_all(std::span<const Point> sample) const {
  for (const Point& p : sample) validate(p);
}

double frechet_value(const Space& space, std::span<const Point> sample,
                     std::span<const double> weights, const Point& p) {
  if (sample.empty()) throw Error(ErrorKind::InvalidArgument, "empty sample");
  if (weights.size() != sample.size())
    throw Error(ErrorKind::InvalidArgument, "weights and sample differ in length");
  space.validate(p);
  double total = 0.0;
  for (std::size_t j = 0; j < sample.size(); ++j) {
    if (kind_of(sample[j]) != kind_of(p))
      throw Error(ErrorKind::MixedSpacePoints, "sample point kind differs from p");
    if (weights[j] < 0.0) throw Error(ErrorKind::InvalidArgument, "negative weight");
    const double d = space.distance(p, sample[j]);
    total += weights[j] * d * d;
  }
  return total;
}

double frechet_value(const Space& space, std::span<const Point> sample, const Point& p) {
  const std::vector<double> weights(sample.size(),
                                    sample.empty() ? 0.0 : 1.0 / static_cast<double>(sample.size()));
  return frechet_value(space, sample, weights, p);
}

}  // namespace frechet
