#include "frechet/spaces/spd.hpp"

#include <cmath>

namespace frechet {
namespace {

const Matrix& matrix_of(const Point& p) { return std::get<SpdPoint>(p).matrix; }

constexpr double kSqrt2 = 1.41421356237309504880;

void require_symmetric(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw Error(ErrorKind::InvalidPoint, "expected a non-empty square matrix");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance)
    throw Error(ErrorKind::InvalidPoint, "matrix is not symmetric");
}

}  // namespace

Matrix spd_logm(const Matrix& a) {
  require_symmetric(a);
  const SymmetricEigen eig = jacobi_eigen(a);
  const double largest = eig.values.cwiseAbs().maxCoeff();
  if (!(eig.values.minCoeff() > 1e-14 * largest))
    throw Error(ErrorKind::NotPositiveDefinite,
                "smallest eigenvalue " + std::to_string(eig.values.minCoeff()));
  return symmetrize(spectral_map(eig, [](double l) { return std::log(l); }));
}

Matrix spd_expm(const Matrix& b) {
  require_symmetric(b);
  return symmetrize(spectral_map(jacobi_eigen(b), [](double l) { return std::exp(l); }));
}

Vector spd_vech(const Matrix& b) {
  const Eigen::Index p = b.rows();
  Vector v(p * (p + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < p; ++i) v[k++] = b(i, i);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = i + 1; j < p; ++j) v[k++] = kSqrt2 * b(i, j);
  return v;
}

Matrix spd_unvech(const Vector& v) {
  // Solve p(p+1)/2 = size for p.
  const auto p = static_cast<Eigen::Index>(
      std::lround((std::sqrt(8.0 * static_cast<double>(v.size()) + 1.0) - 1.0) / 2.0));
  if (p * (p + 1) / 2 != v.size())
    throw Error(ErrorKind::InvalidArgument, "vector length is not triangular");
  Matrix b(p, p);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < p; ++i) b(i, i) = v[k++];
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = i + 1; j < p; ++j) {
      b(i, j) = v[k++] / kSqrt2;
      b(j, i) = b(i, j);
    }
  return b;
}

Matrix spd_mean(std::span<const Point> sample, SpdMetric metric) {
  if (sample.empty()) throw Error(ErrorKind::InvalidArgument, "empty sample");
  const Eigen::Index p = matrix_of(sample.front()).rows();
  Matrix sum = Matrix::Zero(p, p);
  for (const Point& q : sample) {
    if (kind_of(q) != PointKind::spd)
      throw Error(ErrorKind::MixedSpacePoints, "expected spd points");
    sum += metric == SpdMetric::euclidean ? matrix_of(q) : spd_logm(matrix_of(q));
  }
  const Matrix mean = symmetrize(sum / static_cast<double>(sample.size()));
  return metric == SpdMetric::euclidean ? mean : spd_expm(mean);
}

namespace {

class VechChart final : public Chart {
 public:
  VechChart(int p, SpdMetric metric) : p_(p), metric_(metric) {}

  int dim() const override { return p_ * (p_ + 1) / 2; }
  Vector forward(const Point& q) const override {
    return spd_vech(metric_ == SpdMetric::euclidean ? matrix_of(q) : spd_logm(matrix_of(q)));
  }
  Point inverse(const Vector& x) const override {
    const Matrix b = spd_unvech(x);
    return make_spd(metric_ == SpdMetric::euclidean ? b : spd_expm(b));
  }
  double h(const Vector& x, const Point& q) const override { return (x - forward(q)).squaredNorm(); }
  bool has_analytic_derivatives() const override { return true; }
  Vector analytic_grad_h(const Vector& x, const Point& q) const override {
    return 2.0 * (x - forward(q));
  }
  Matrix analytic_hess_h(const Vector&, const Point&) const override {
    return 2.0 * Matrix::Identity(dim(), dim());
  }

 private:
  int p_;
  SpdMetric metric_;
};

}  // namespace

SpdSpace::SpdSpace(int p, SpdMetric metric) : p_(p), metric_(metric) {
  if (p < 1) throw Error(ErrorKind::InvalidArgument, "spd matrix size must be >= 1");
}

std::string SpdSpace::name() const {
  return std::string("spd(") + std::to_string(p_) + "," +
         (metric_ == SpdMetric::euclidean ? "euclidean" : "log-euclidean") + ")";
}

double SpdSpace::distance(const Point& a, const Point& b) const {
  validate(a);
  validate(b);
  if (metric_ == SpdMetric::euclidean) return (matrix_of(a) - matrix_of(b)).norm();
  return (spd_logm(matrix_of(a)) - spd_logm(matrix_of(b))).norm();
}

void SpdSpace::validate(const Point& p) const {
  if (kind_of(p) != PointKind::spd) throw Error(ErrorKind::MixedSpacePoints, "expected an spd point");
  if (matrix_of(p).rows() != p_ || matrix_of(p).cols() != p_)
    throw Error(ErrorKind::InvalidPoint, "spd point has wrong size");
}

ChartPtr SpdSpace::chart_at(const Point& base) const {
  validate(base);
  return std::make_shared<VechChart>(p_, metric_);
}

Point SpdSpace::closed_form_mean(std::span<const Point> sample) const {
  validate_all(sample);
  return make_spd(spd_mean(sample, metric_));
}

Point SpdSpace::initial_guess(std::span<const Point> sample) const {
  return closed_form_mean(sample);
}

Vector SpdSpace::chart_vector(const Point& p) const {
  validate(p);
  return spd_vech(metric_ == SpdMetric::euclidean ? matrix_of(p) : spd_logm(matrix_of(p)));
}

}  // namespace frechet
