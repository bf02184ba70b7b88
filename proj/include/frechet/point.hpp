#pragma once

#include <string_view>
#include <variant>

#include "frechet/linalg.hpp"

namespace frechet {

enum class PointKind { euclidean, sphere, spd, openbook };

std::string_view to_string(PointKind kind);

struct EuclideanPoint {
  Vector coords;
};

/// Unit vector in R^{d+1}.
struct SpherePoint {
  Vector unit;
};

/// Symmetric positive definite p x p matrix.
struct SpdPoint {
  Matrix matrix;
};

/// (leaf; x0, x1..xD). Leaf 0 is the spine and carries x0 == 0; points with
/// x0 == 0 are always stored with leaf 0.
struct OpenBookPoint {
  int leaf = 0;
  Vector coords;
};

using Point = std::variant<EuclideanPoint, SpherePoint, SpdPoint, OpenBookPoint>;

PointKind kind_of(const Point& p);

// Validating constructors. They throw Error(InvalidPoint / NotPositiveDefinite)
// when the payload violates the point invariants.
Point make_euclidean(Vector coords);
Point make_sphere(Vector unit);
Point make_spd(Matrix matrix);
Point make_openbook(int leaf, Vector coords);

inline constexpr double kUnitNormTolerance = 1e-12;
inline constexpr double kSymmetryTolerance = 1e-12;

}  // namespace frechet
