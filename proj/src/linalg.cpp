#include "frechet/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace frechet {

namespace {

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (i != j) sum += a(i, j) * a(i, j);
  return std::sqrt(sum);
}

}  // namespace

SymmetricEigen jacobi_eigen(const Matrix& input, double tolerance, int max_sweeps) {
  if (input.rows() != input.cols())
    throw Error(ErrorKind::InvalidArgument, "jacobi_eigen needs a square matrix");
  const Eigen::Index n = input.rows();
  Matrix a = symmetrize(input);
  Matrix v = Matrix::Identity(n, n);

  const double scale = a.norm();
  if (!std::isfinite(scale))
    throw Error(ErrorKind::NonFiniteValue, "matrix has non-finite entries");
  const double target = tolerance * scale;

  for (int sweep = 0; sweep < max_sweeps && off_diagonal_norm(a) > target; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation zeroing a(p,q): tan(theta) = t, chosen with |theta| <= pi/4.
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
  SymmetricEigen out{Vector(n), Matrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values[i] = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

double condition_number(const SymmetricEigen& eig) {
  if (eig.values.size() == 0) return 1.0;
  const double largest = eig.values.cwiseAbs().maxCoeff();
  const double smallest = eig.values.cwiseAbs().minCoeff();
  if (smallest == 0.0) return std::numeric_limits<double>::infinity();
  return largest / smallest;
}

SymmetricInverse symmetric_inverse(const Matrix& a, double max_condition,
                                   ErrorKind failure) {
  if (a.size() == 0) return {Matrix(0, 0), 1.0, true};
  const SymmetricEigen eig = jacobi_eigen(a);
  const double cond = condition_number(eig);
  if (!(cond <= max_condition))
    throw Error(failure, "condition number " + std::to_string(cond) +
                             " exceeds " + std::to_string(max_condition));
  SymmetricInverse out;
  out.inverse = symmetrize(spectral_map(eig, [](double l) { return 1.0 / l; }));
  out.condition = cond;
  out.positive_definite = eig.values.minCoeff() > 0.0;
  return out;
}

}  // namespace frechet
