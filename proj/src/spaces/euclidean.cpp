#include "frechet/spaces/euclidean.hpp"

namespace frechet {
namespace {

const Vector& coords_of(const Point& p) { return std::get<EuclideanPoint>(p).coords; }

class IdentityChart final : public Chart {
 public:
  explicit IdentityChart(int dim) : dim_(dim) {}

  int dim() const override { return dim_; }
  Vector forward(const Point& p) const override { return coords_of(p); }
  Point inverse(const Vector& x) const override { return make_euclidean(x); }
  double h(const Vector& x, const Point& q) const override {
    return (x - coords_of(q)).squaredNorm();
  }
  bool has_analytic_derivatives() const override { return true; }
  Vector analytic_grad_h(const Vector& x, const Point& q) const override {
    return 2.0 * (x - coords_of(q));
  }
  Matrix analytic_hess_h(const Vector&, const Point&) const override {
    return 2.0 * Matrix::Identity(dim_, dim_);
  }

 private:
  int dim_;
};

}  // namespace

EuclideanSpace::EuclideanSpace(int dim) : dim_(dim) {
  if (dim < 1) throw Error(ErrorKind::InvalidArgument, "euclidean dimension must be >= 1");
}

std::string EuclideanSpace::name() const { return "euclidean(" + std::to_string(dim_) + ")"; }

double EuclideanSpace::distance(const Point& a, const Point& b) const {
  validate(a);
  validate(b);
  return (coords_of(a) - coords_of(b)).norm();
}

void EuclideanSpace::validate(const Point& p) const {
  if (kind_of(p) != PointKind::euclidean)
    throw Error(ErrorKind::MixedSpacePoints, "expected a euclidean point");
  if (coords_of(p).size() != dim_)
    throw Error(ErrorKind::InvalidPoint, "euclidean point has wrong dimension");
}

ChartPtr EuclideanSpace::chart_at(const Point& base) const {
  validate(base);
  return std::make_shared<IdentityChart>(dim_);
}

Point EuclideanSpace::closed_form_mean(std::span<const Point> sample) const {
  if (sample.empty()) throw Error(ErrorKind::InvalidArgument, "empty sample");
  Vector sum = Vector::Zero(dim_);
  for (const Point& p : sample) {
    validate(p);
    sum += coords_of(p);
  }
  return EuclideanPoint{sum / static_cast<double>(sample.size())};
}

Point EuclideanSpace::initial_guess(std::span<const Point> sample) const {
  return closed_form_mean(sample);
}

}  // namespace frechet
