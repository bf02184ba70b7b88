#include "frechet/diff.hpp"

#include <algorithm>

#include "frechet/error.hpp"

namespace frechet {
namespace {

double probe(const ScalarField& f, const Vector& x) {
  const double value = f(x);
  if (!std::isfinite(value))
    throw Error(ErrorKind::NonFiniteValue, "function is not finite at a probe point");
  return value;
}

double step_for(double scale, double xr) { return scale * std::max(1.0, std::abs(xr)); }

Vector central_gradient(const ScalarField& f, const Vector& x, double scale) {
  Vector grad(x.size());
  Vector probe_point = x;
  for (Eigen::Index r = 0; r < x.size(); ++r) {
    const double h = step_for(scale, x[r]);
    probe_point[r] = x[r] + h;
    const double up = probe(f, probe_point);
    probe_point[r] = x[r] - h;
    const double down = probe(f, probe_point);
    probe_point[r] = x[r];
    grad[r] = (up - down) / (2.0 * h);
  }
  return grad;
}

Matrix central_hessian(const ScalarField& f, const Vector& x, double scale) {
  const Eigen::Index s = x.size();
  Matrix hess(s, s);
  const double center = probe(f, x);
  Vector steps(s);
  for (Eigen::Index r = 0; r < s; ++r) steps[r] = step_for(scale, x[r]);

  Vector y = x;
  for (Eigen::Index r = 0; r < s; ++r) {
    const double h = steps[r];
    y[r] = x[r] + h;
    const double up = probe(f, y);
    y[r] = x[r] - h;
    const double down = probe(f, y);
    y[r] = x[r];
    hess(r, r) = (up - 2.0 * center + down) / (h * h);
  }
  for (Eigen::Index r = 0; r < s; ++r) {
    for (Eigen::Index c = r + 1; c < s; ++c) {
      const double hr = steps[r];
      const double hc = steps[c];
      double corners[4];
      int i = 0;
      for (double sr : {1.0, -1.0}) {
        for (double sc : {1.0, -1.0}) {
          y[r] = x[r] + sr * hr;
          y[c] = x[c] + sc * hc;
          corners[i++] = probe(f, y);
        }
      }
      y[r] = x[r];
      y[c] = x[c];
      const double mixed = (corners[0] - corners[1] - corners[2] + corners[3]) / (4.0 * hr * hc);
      hess(r, c) = mixed;
      hess(c, r) = mixed;
    }
  }
  return hess;
}

}  // namespace

Vector numeric_gradient(const ScalarField& f, const Vector& x, const DiffConfig& cfg) {
  if (!(cfg.step_scale > 0.0))
    throw Error(ErrorKind::InvalidArgument, "finite-difference step scale must be > 0");
  Vector coarse = central_gradient(f, x, cfg.step_scale);
  if (!cfg.richardson) return coarse;
  const Vector fine = central_gradient(f, x, 0.5 * cfg.step_scale);
  return (4.0 * fine - coarse) / 3.0;
}

Matrix numeric_hessian(const ScalarField& f, const Vector& x, const DiffConfig& cfg) {
  if (!(cfg.hessian_step_scale > 0.0))
    throw Error(ErrorKind::InvalidArgument, "finite-difference step scale must be > 0");
  Matrix coarse = central_hessian(f, x, cfg.hessian_step_scale);
  if (cfg.richardson) {
    const Matrix fine = central_hessian(f, x, 0.5 * cfg.hessian_step_scale);
    coarse = (4.0 * fine - coarse) / 3.0;
  }
  return symmetrize(coarse);
}

}  // namespace frechet
