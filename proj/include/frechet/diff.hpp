#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include "frechet/linalg.hpp"

namespace frechet {

/// Finite-difference settings. The step along coordinate r is
/// scale * max(1, |x_r|).
struct DiffConfig {
  /// Central first differences: eps^(1/3).
  double step_scale = std::cbrt(std::numeric_limits<double>::epsilon());
  /// Second differences: eps^(1/4). Dividing by h^2 makes the eps^(1/3) step
  /// lose about six digits to round-off.
  double hessian_step_scale = std::sqrt(std::sqrt(std::numeric_limits<double>::epsilon()));
  /// Combine steps h and h/2 to cancel the O(h^2) truncation term.
  bool richardson = false;
};

using ScalarField = std::function<double(const Vector&)>;

Vector numeric_gradient(const ScalarField& f, const Vector& x, const DiffConfig& cfg = {});

/// Second-order central differences, returned symmetrized as (H + H^T) / 2.
Matrix numeric_hessian(const ScalarField& f, const Vector& x, const DiffConfig& cfg = {});

}  // namespace frechet
