#include "frechet/spaces/openbook.hpp"

#include <algorithm>
#include <cmath>

namespace frechet {
namespace {

const OpenBookPoint& book_of(const Point& p) {
  if (kind_of(p) != PointKind::openbook)
    throw Error(ErrorKind::MixedSpacePoints, "expected an open book point");
  return std::get<OpenBookPoint>(p);
}

}  // namespace

double openbook_distance(const Point& a, const Point& b) {
  const OpenBookPoint& x = book_of(a);
  const OpenBookPoint& y = book_of(b);
  if (x.coords.size() != y.coords.size())
    throw Error(ErrorKind::InvalidPoint, "open book points of different spine dimension");
  if (x.leaf == y.leaf || x.leaf == 0 || y.leaf == 0) return (x.coords - y.coords).norm();
  const Eigen::Index d = x.coords.size() - 1;
  const double across = x.coords[0] + y.coords[0];
  return std::sqrt(across * across + (x.coords.tail(d) - y.coords.tail(d)).squaredNorm());
}

Vector openbook_fold(int k, const Point& p) {
  const OpenBookPoint& x = book_of(p);
  Vector z = x.coords;
  if (x.leaf != 0 && x.leaf != k) z[0] = -z[0];
  return z;
}

OpenBookMoments openbook_moments(std::span<const Point> sample, int leaves) {
  if (sample.empty()) throw Error(ErrorKind::InvalidArgument, "empty sample");
  const Eigen::Index dim = book_of(sample.front()).coords.size();
  OpenBookMoments out;
  out.leaves = leaves;
  out.spine_dim = static_cast<int>(dim - 1);
  out.n = sample.size();

  // Per-leaf sums of x0; m_k = (2 S_k - sum_k' S_k') / n. Since floating-point
  // summation of nonnegative terms is monotone, at most one m_k can come out
  // positive, matching the exact argument.
  std::vector<double> leaf_sums(static_cast<std::size_t>(leaves), 0.0);
  std::vector<std::size_t> counts(static_cast<std::size_t>(leaves), 0);
  std::size_t spine_count = 0;
  Vector rest_sum = Vector::Zero(dim - 1);
  for (const Point& p : sample) {
    const OpenBookPoint& x = book_of(p);
    if (x.coords.size() != dim)
      throw Error(ErrorKind::InvalidPoint, "open book points of different spine dimension");
    if (x.leaf > leaves) throw Error(ErrorKind::InvalidPoint, "leaf label exceeds leaf count");
    if (x.leaf == 0) {
      ++spine_count;
    } else {
      leaf_sums[static_cast<std::size_t>(x.leaf - 1)] += x.coords[0];
      ++counts[static_cast<std::size_t>(x.leaf - 1)];
    }
    rest_sum += x.coords.tail(dim - 1);
  }
  double total = 0.0;
  for (double s : leaf_sums) total += s;

  const double n = static_cast<double>(sample.size());
  for (int k = 0; k < leaves; ++k) {
    const auto i = static_cast<std::size_t>(k);
    out.weights.push_back(static_cast<double>(counts[i]) / n);
    out.folded_means.push_back((2.0 * leaf_sums[i] - total) / n);
  }
  out.spine_fraction = static_cast<double>(spine_count) / n;
  out.spine_mean = rest_sum / n;
  return out;
}

OpenBookClass openbook_classify(const OpenBookMoments& moments) {
  if (moments.folded_means.empty()) return {OpenBookClass::Kind::spine, 0};
  const auto best = std::max_element(moments.folded_means.begin(), moments.folded_means.end());
  const int leaf = static_cast<int>(best - moments.folded_means.begin()) + 1;
  if (*best > 0.0) return {OpenBookClass::Kind::leaf, leaf};
  if (*best == 0.0) return {OpenBookClass::Kind::boundary, leaf};
  return {OpenBookClass::Kind::spine, 0};
}

Point openbook_frechet_mean(std::span<const Point> sample, int leaves) {
  const OpenBookMoments moments = openbook_moments(sample, leaves);
  const OpenBookClass cls = openbook_classify(moments);
  Vector coords(moments.spine_dim + 1);
  coords.tail(moments.spine_dim) = moments.spine_mean;
  if (cls.kind == OpenBookClass::Kind::leaf) {
    coords[0] = moments.folded_means[static_cast<std::size_t>(cls.leaf - 1)];
    return OpenBookPoint{cls.leaf, coords};
  }
  coords[0] = 0.0;
  return OpenBookPoint{0, coords};
}

namespace {

class LeafChart final : public Chart {
 public:
  LeafChart(int leaf, int spine_dim) : leaf_(leaf), spine_dim_(spine_dim) {}

  int dim() const override { return spine_dim_ + 1; }
  Vector forward(const Point& p) const override {
    const OpenBookPoint& x = book_of(p);
    if (x.leaf != leaf_ && x.leaf != 0)
      throw Error(ErrorKind::InvalidPoint, "point lies on another leaf than the chart");
    return x.coords;
  }
  Point inverse(const Vector& x) const override {
    if (x[0] < 0.0) throw Error(ErrorKind::InvalidPoint, "negative x0 is outside the leaf chart");
    return make_openbook(x[0] == 0.0 ? 0 : leaf_, x);
  }
  // |x - f_k(q)|^2 equals rho^2 for x on the closed leaf and extends smoothly
  // across the spine.
  double h(const Vector& x, const Point& q) const override {
    return (x - openbook_fold(leaf_, q)).squaredNorm();
  }
  bool has_analytic_derivatives() const override { return true; }
  Vector analytic_grad_h(const Vector& x, const Point& q) const override {
    return 2.0 * (x - openbook_fold(leaf_, q));
  }
  Matrix analytic_hess_h(const Vector&, const Point&) const override {
    return 2.0 * Matrix::Identity(dim(), dim());
  }

 private:
  int leaf_;
  int spine_dim_;
};

class SpineChart final : public Chart {
 public:
  explicit SpineChart(int spine_dim) : spine_dim_(spine_dim) {}

  int dim() const override { return spine_dim_; }
  Vector forward(const Point& p) const override {
    const OpenBookPoint& x = book_of(p);
    if (x.leaf != 0) throw Error(ErrorKind::InvalidPoint, "point lies off the spine");
    return x.coords.tail(spine_dim_);
  }
  Point inverse(const Vector& x) const override {
    Vector coords(spine_dim_ + 1);
    coords[0] = 0.0;
    coords.tail(spine_dim_) = x;
    return OpenBookPoint{0, coords};
  }
  double h(const Vector& x, const Point& q) const override {
    const OpenBookPoint& y = book_of(q);
    return y.coords[0] * y.coords[0] + (x - y.coords.tail(spine_dim_)).squaredNorm();
  }
  bool has_analytic_derivatives() const override { return true; }
  Vector analytic_grad_h(const Vector& x, const Point& q) const override {
    return 2.0 * (x - book_of(q).coords.tail(spine_dim_));
  }
  Matrix analytic_hess_h(const Vector&, const Point&) const override {
    return 2.0 * Matrix::Identity(spine_dim_, spine_dim_);
  }

 private:
  int spine_dim_;
};

}  // namespace

OpenBookSpace::OpenBookSpace(int leaves, int spine_dim) : leaves_(leaves), spine_dim_(spine_dim) {
  if (leaves < 2) throw Error(ErrorKind::InvalidArgument, "open book needs at least two leaves");
  if (spine_dim < 0) throw Error(ErrorKind::InvalidArgument, "negative spine dimension");
}

std::string OpenBookSpace::name() const {
  return "openbook(" + std::to_string(leaves_) + "," + std::to_string(spine_dim_) + ")";
}

double OpenBookSpace::distance(const Point& a, const Point& b) const {
  validate(a);
  validate(b);
  return openbook_distance(a, b);
}

void OpenBookSpace::validate(const Point& p) const {
  const OpenBookPoint& x = book_of(p);
  if (x.coords.size() != spine_dim_ + 1)
    throw Error(ErrorKind::InvalidPoint, "open book point has wrong dimension");
  if (x.leaf < 0 || x.leaf > leaves_) throw Error(ErrorKind::InvalidPoint, "leaf label out of range");
  if (x.coords[0] < 0.0) throw Error(ErrorKind::InvalidPoint, "negative x0");
  if ((x.leaf == 0) != (x.coords[0] == 0.0))
    throw Error(ErrorKind::InvalidPoint, "x0 == 0 must coincide with the spine label");
}

ChartPtr OpenBookSpace::chart_at(const Point& base) const {
  validate(base);
  const int leaf = std::get<OpenBookPoint>(base).leaf;
  if (leaf == 0) return std::make_shared<SpineChart>(spine_dim_);
  return std::make_shared<LeafChart>(leaf, spine_dim_);
}

Point OpenBookSpace::closed_form_mean(std::span<const Point> sample) const {
  validate_all(sample);
  return openbook_frechet_mean(sample, leaves_);
}

Point OpenBookSpace::initial_guess(std::span<const Point> sample) const {
  return closed_form_mean(sample);
}

}  // namespace frechet
