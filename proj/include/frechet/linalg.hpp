#pragma once

#include <Eigen/Dense>

#include "frechet/error.hpp"

namespace frechet {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Spectral decomposition A = V diag(values) V^T of a symmetric matrix,
/// eigenvalues ascending, eigenvectors in the columns of `vectors`.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm falls
/// below `tolerance` times the Frobenius norm of the input.
SymmetricEigen jacobi_eigen(const Matrix& a, double tolerance = 1e-13,
                            int max_sweeps = 100);

/// max|lambda| / min|lambda|; +inf when the smallest magnitude is zero.
double condition_number(const SymmetricEigen& eig);

/// V f(Lambda) V^T.
template <typename F>
Matrix spectral_map(const SymmetricEigen& eig, F&& f) {
  Vector mapped(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) mapped[i] = f(eig.values[i]);
  return eig.vectors * mapped.asDiagonal() * eig.vectors.transpose();
}

struct SymmetricInverse {
  Matrix inverse;
  double condition = 1.0;
  bool positive_definite = true;
};

/// Inverts a symmetric matrix through its eigendecomposition. Throws an
/// Error of kind `failure` when the condition number exceeds `max_condition`.
SymmetricInverse symmetric_inverse(const Matrix& a, double max_condition,
                                   ErrorKind failure);

inline Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

}  // namespace frechet
