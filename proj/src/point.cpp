#include "frechet/point.hpp"

#include <cmath>
#include <string>

namespace frechet {

std::string_view to_string(PointKind kind) {
  switch (kind) {
    case PointKind::euclidean: return "euclidean";
    case PointKind::sphere: return "sphere";
    case PointKind::spd: return "spd";
    case PointKind::openbook: return "openbook";
  }
  return "unknown";
}

PointKind kind_of(const Point& p) { return static_cast<PointKind>(p.index()); }

namespace {

void require_finite(const Eigen::Ref<const Matrix>& m, const char* what) {
  if (!m.allFinite())
    throw Error(ErrorKind::InvalidPoint, std::string(what) + " has non-finite entries");
}

}  // namespace

Point make_euclidean(Vector coords) {
  require_finite(coords, "euclidean point");
  return EuclideanPoint{std::move(coords)};
}

Point make_sphere(Vector unit) {
  require_finite(unit, "sphere point");
  const double norm = unit.norm();
  if (std::abs(norm - 1.0) > kUnitNormTolerance)
    throw Error(ErrorKind::InvalidPoint,
                "sphere point has norm " + std::to_string(norm));
  return SpherePoint{std::move(unit)};
}

Point make_spd(Matrix matrix) {
  require_finite(matrix, "spd point");
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
    throw Error(ErrorKind::InvalidPoint, "spd point must be a non-empty square matrix");
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance)
    throw Error(ErrorKind::InvalidPoint, "spd point is not symmetric");
  const SymmetricEigen eig = jacobi_eigen(matrix);
  const double largest = eig.values.cwiseAbs().maxCoeff();
  if (!(eig.values.minCoeff() > 1e-14 * largest))
    throw Error(ErrorKind::NotPositiveDefinite,
                "smallest eigenvalue " + std::to_string(eig.values.minCoeff()));
  return SpdPoint{std::move(matrix)};
}

Point make_openbook(int leaf, Vector coords) {
  require_finite(coords, "open book point");
  if (coords.size() < 1)
    throw Error(ErrorKind::InvalidPoint, "open book point needs at least x0");
  if (leaf < 0) throw Error(ErrorKind::InvalidPoint, "negative leaf label");
  if (coords[0] < 0.0) throw Error(ErrorKind::InvalidPoint, "open book x0 must be >= 0");
  if (leaf == 0 && coords[0] != 0.0)
    throw Error(ErrorKind::InvalidPoint, "spine point must have x0 == 0");
  if (coords[0] == 0.0) leaf = 0;
  return OpenBookPoint{leaf, std::move(coords)};
}

}  // namespace frechet
