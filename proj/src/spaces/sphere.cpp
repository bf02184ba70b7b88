#include "frechet/spaces/sphere.hpp"

#include <cmath>
#include <limits>

namespace frechet {

Vector sphere_exp(const Vector& base, const Vector& v) {
  const double len = v.norm();
  if (len == 0.0) return base;
  Vector out = std::cos(len) * base + (std::sin(len) / len) * v;
  return out / out.norm();
}

Vector sphere_log(const Vector& base, const Vector& p) {
  if ((p + base).norm() < 1e-9)
    throw Error(ErrorKind::CutLocus, "log map undefined at the antipode of the base point");
  Vector tangent = p - p.dot(base) * base;
  const double len = tangent.norm();
  if (len == 0.0) return Vector::Zero(base.size());
  return (sphere_geodesic_distance(base, p) / len) * tangent;
}

double sphere_geodesic_distance(const Vector& p, const Vector& q) {
  return 2.0 * std::atan2((p - q).norm(), (p + q).norm());
}

Vector sphere_extrinsic_project(const Vector& m) {
  const double len = m.norm();
  if (!(len > 1e-12))
    throw Error(ErrorKind::NonUniqueProjection,
                "ambient mean is at the center; every point of the sphere is nearest");
  return m / len;
}

Matrix sphere_tangent_basis(const Vector& base) {
  const Eigen::Index n = base.size();
  const Matrix column = base;
  Eigen::HouseholderQR<Matrix> qr(column);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  return q.rightCols(n - 1);
}

namespace {

const Vector& unit_of(const Point& p) { return std::get<SpherePoint>(p).unit; }

class LogChart final : public Chart {
 public:
  explicit LogChart(Vector base) : base_(std::move(base)), basis_(sphere_tangent_basis(base_)) {}

  int dim() const override { return static_cast<int>(basis_.cols()); }
  Vector forward(const Point& p) const override {
    return basis_.transpose() * sphere_log(base_, unit_of(p));
  }
  Point inverse(const Vector& x) const override {
    return SpherePoint{sphere_exp(base_, basis_ * x)};
  }
  double h(const Vector& x, const Point& q) const override {
    const double d = sphere_geodesic_distance(sphere_exp(base_, basis_ * x), unit_of(q));
    return d * d;
  }

 private:
  Vector base_;
  Matrix basis_;
};

class TangentProjectionChart final : public Chart {
 public:
  explicit TangentProjectionChart(Vector base)
      : base_(std::move(base)), basis_(sphere_tangent_basis(base_)) {}

  int dim() const override { return static_cast<int>(basis_.cols()); }
  Vector forward(const Point& p) const override {
    const Vector& u = unit_of(p);
    if (!(u.dot(base_) > 0.0))
      throw Error(ErrorKind::InvalidPoint, "point lies outside the tangent-projection chart");
    return basis_.transpose() * u;
  }
  Point inverse(const Vector& x) const override {
    const double r2 = x.squaredNorm();
    if (!(r2 < 1.0))
      throw Error(ErrorKind::InvalidPoint, "chart coordinates outside the unit ball");
    return SpherePoint{lift(x, r2)};
  }
  double h(const Vector& x, const Point& q) const override {
    const double r2 = x.squaredNorm();
    if (!(r2 < 1.0)) return std::numeric_limits<double>::infinity();
    return (lift(x, r2) - unit_of(q)).squaredNorm();
  }

 private:
  Vector lift(const Vector& x, double r2) const {
    Vector u = std::sqrt(1.0 - r2) * base_ + basis_ * x;
    return u / u.norm();
  }

  Vector base_;
  Matrix basis_;
};

}  // namespace

SphereSpace::SphereSpace(int d, SphereMetric metric) : d_(d), metric_(metric) {
  if (d < 1) throw Error(ErrorKind::InvalidArgument, "sphere dimension must be >= 1");
}

std::string SphereSpace::name() const {
  return std::string("sphere(") + std::to_string(d_) + "," +
         (metric_ == SphereMetric::intrinsic ? "intrinsic" : "extrinsic") + ")";
}

double SphereSpace::distance(const Point& a, const Point& b) const {
  validate(a);
  validate(b);
  if (metric_ == SphereMetric::intrinsic)
    return sphere_geodesic_distance(unit_of(a), unit_of(b));
  return (unit_of(a) - unit_of(b)).norm();
}

void SphereSpace::validate(const Point& p) const {
  if (kind_of(p) != PointKind::sphere)
    throw Error(ErrorKind::MixedSpacePoints, "expected a sphere point");
  if (unit_of(p).size() != d_ + 1)
    throw Error(ErrorKind::InvalidPoint, "sphere point has wrong ambient dimension");
}

ChartPtr SphereSpace::chart_at(const Point& base) const {
  validate(base);
  if (metric_ == SphereMetric::intrinsic) return std::make_shared<LogChart>(unit_of(base));
  return std::make_shared<TangentProjectionChart>(unit_of(base));
}

MeanStrategy SphereSpace::default_strategy() const {
  return metric_ == SphereMetric::intrinsic ? MeanStrategy::karcher : MeanStrategy::closed_form;
}

Point SphereSpace::closed_form_mean(std::span<const Point> sample) const {
  if (metric_ == SphereMetric::intrinsic) return Space::closed_form_mean(sample);
  if (sample.empty()) throw Error(ErrorKind::InvalidArgument, "empty sample");
  Vector sum = Vector::Zero(d_ + 1);
  for (const Point& p : sample) {
    validate(p);
    sum += unit_of(p);
  }
  return SpherePoint{sphere_extrinsic_project(sum / static_cast<double>(sample.size()))};
}

Point SphereSpace::initial_guess(std::span<const Point> sample) const {
  if (sample.empty()) throw Error(ErrorKind::InvalidArgument, "empty sample");
  Vector sum = Vector::Zero(d_ + 1);
  for (const Point& p : sample) {
    validate(p);
    sum += unit_of(p);
  }
  if (sum.norm() > 1e-12 * static_cast<double>(sample.size()))
    return SpherePoint{sphere_extrinsic_project(sum)};
  return sample.front();
}

}  // namespace frechet
