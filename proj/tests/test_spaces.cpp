#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "frechet/estimator.hpp"
#include "support.hpp"

using namespace frechet;
using testing::Random;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

Point book(int leaf, std::initializer_list<double> coords) { return make_openbook(leaf, vec(coords)); }

template <typename F>
ErrorKind kind_thrown(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("sphere exp, log and distance") {
  const Vector north = Vector::Unit(3, 2);
  const Vector e = sphere_exp(north, vec({std::numbers::pi / 2, 0.0, 0.0}));
  CHECK((e - Vector::Unit(3, 0)).norm() < 1e-15);

  const Vector p = vec({0.6, 0.0, 0.8});
  CHECK(sphere_log(p, p).norm() == 0.0);
  CHECK(sphere_geodesic_distance(Vector::Unit(3, 0), Vector::Unit(3, 1)) ==
        doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
  CHECK(kind_thrown([&] { sphere_log(north, -north); }) == ErrorKind::CutLocus);
}

TEST_CASE("sphere log inverts exp inside the injectivity radius") {
  Random rng(3);
  for (int i = 0; i < 2000; ++i) {
    const int d = rng.integer(1, 5);
    Vector base = rng.normal_vector(d + 1);
    base /= base.norm();
    Vector v = rng.normal_vector(d + 1);
    v -= v.dot(base) * base;
    v *= rng.uniform(0.0, std::numbers::pi - 0.01) / v.norm();
    CHECK((sphere_log(base, sphere_exp(base, v)) - v).norm() <= 1e-10);
  }
}

TEST_CASE("sphere extrinsic projection") {
  CHECK((sphere_extrinsic_project(vec({0.0, 0.0, 0.5})) - vec({0.0, 0.0, 1.0})).norm() < 1e-15);
  CHECK((sphere_extrinsic_project(vec({3.0, 4.0, 0.0})) - vec({0.6, 0.8, 0.0})).norm() < 1e-15);
  CHECK(kind_thrown([] { sphere_extrinsic_project(Vector::Zero(3)); }) ==
        ErrorKind::NonUniqueProjection);
}

TEST_CASE("sphere tangent basis is orthonormal and tangent") {
  Random rng(8);
  for (int i = 0; i < 100; ++i) {
    const Point p = rng.sphere(4);
    const Vector& u = std::get<SpherePoint>(p).unit;
    const Matrix b = sphere_tangent_basis(u);
    CHECK(b.cols() == 4);
    CHECK((b.transpose() * b - Matrix::Identity(4, 4)).norm() < 1e-13);
    CHECK((b.transpose() * u).norm() < 1e-13);
  }
}

TEST_CASE("sphere intrinsic Hessian at the base matches the closed form") {
  // At the chart origin, the Hessian of d^2(exp(x), q) in normal coordinates is
  // 2 [u u^T + theta cot(theta) (I - u u^T)], u the unit direction of log q.
  const SphereSpace s2(2, SphereMetric::intrinsic);
  Random rng(19);
  for (int i = 0; i < 50; ++i) {
    const Point base = rng.sphere(2);
    const ChartPtr chart = s2.chart_at(base);
    const Vector v = (0.1 + 2.0 * rng.uniform()) * rng.normal_vector(2).normalized();
    const Point q = chart->inverse(v);
    const double theta = v.norm();
    const Vector u = v / theta;
    const Matrix expected = 2.0 * (u * u.transpose() + theta / std::tan(theta) *
                                                           (Matrix::Identity(2, 2) - u * u.transpose()));
    const Matrix numeric = chart->hess_h(Vector::Zero(2), q);
    CHECK((numeric - expected).cwiseAbs().maxCoeff() < 1e-5);
    CHECK((chart->grad_h(Vector::Zero(2), q) + 2.0 * v).norm() < 1e-7);
  }
}

TEST_CASE("sphere means: intrinsic and extrinsic agree for concentrated data") {
  Random rng(41);
  const SphereSpace intrinsic(2, SphereMetric::intrinsic);
  const SphereSpace extrinsic(2, SphereMetric::extrinsic);
  for (int trial = 0; trial < 50; ++trial) {
    const Point center = rng.sphere(2);
    const ChartPtr chart = intrinsic.chart_at(center);
    std::vector<Point> sample;
    for (int j = 0; j < 30; ++j) {
      Vector v = rng.normal_vector(2);
      v *= rng.uniform(0.0, 0.1) / v.norm();
      sample.push_back(chart->inverse(v));
    }
    const Point mi = estimate_mean(intrinsic, sample).mean;
    const Point me = estimate_mean(extrinsic, sample).mean;
    CHECK(intrinsic.distance(mi, me) <= 0.02);
  }
}

TEST_CASE("sphere symmetric sample has the pole as mean") {
  const SphereSpace s2(2, SphereMetric::intrinsic);
  const double a = 0.4;
  const std::vector<Point> sample{SpherePoint{vec({std::sin(a), 0.0, std::cos(a)})},
                                  SpherePoint{vec({-std::sin(a), 0.0, std::cos(a)})}};
  const FrechetFit fit = estimate_mean(s2, sample);
  CHECK((std::get<SpherePoint>(fit.mean).unit - Vector::Unit(3, 2)).norm() < 1e-12);
}

TEST_CASE("spd logm and expm examples") {
  const Matrix l = spd_logm(Vector(vec({std::numbers::e, 1.0, 1.0})).asDiagonal());
  CHECK((l - Matrix(vec({1.0, 0.0, 0.0}).asDiagonal())).norm() < 1e-15);
  CHECK(spd_logm(Matrix::Identity(3, 3)).norm() == 0.0);

  // Eigenpairs (3, (1,1)/sqrt2) and (1, (1,-1)/sqrt2) give (ln 3 / 2) [[1,1],[1,1]].
  const Matrix a = (Matrix(2, 2) << 2.0, 1.0, 1.0, 2.0).finished();
  const Matrix expected = 0.5 * std::log(3.0) * Matrix::Ones(2, 2);
  CHECK((spd_logm(a) - expected).norm() < 1e-14);
  CHECK(expected(0, 0) == doctest::Approx(0.5493).epsilon(1e-4));

  CHECK(kind_thrown([] { spd_logm((Matrix(2, 2) << 1.0, 0.0, 0.0, 0.0).finished()); }) ==
        ErrorKind::NotPositiveDefinite);
}

TEST_CASE("spd expm and logm round trip") {
  Random rng(13);
  for (int i = 0; i < 1000; ++i) {
    const int p = rng.integer(1, 5);
    const Matrix q = rng.orthogonal(p);
    Vector spectrum(p);
    for (int j = 0; j < p; ++j) spectrum[j] = rng.uniform(-3.0, 3.0);
    Matrix b = q * spectrum.asDiagonal() * q.transpose();
    b = 0.5 * (b + b.transpose());
    CHECK((spd_logm(spd_expm(b)) - b).norm() <= 1e-10);
    const Matrix a = rng.spd(p);
    CHECK((spd_expm(spd_logm(a)) - a).norm() <= 1e-10 * std::max(1.0, a.norm()));
  }
}

TEST_CASE("spd vech examples") {
  CHECK((spd_vech(Matrix::Identity(3, 3)) - vec({1, 1, 1, 0, 0, 0})).norm() == 0.0);
  Matrix b = Matrix::Zero(3, 3);
  b(0, 1) = b(1, 0) = 1.0;
  const Vector v = spd_vech(b);
  CHECK((v - vec({0, 0, 0, std::sqrt(2.0), 0, 0})).norm() == 0.0);
  CHECK(v.norm() == doctest::Approx(b.norm()).epsilon(1e-15));

  Matrix order = Matrix::Zero(3, 3);
  order(0, 2) = order(2, 0) = 2.0;
  order(1, 2) = order(2, 1) = 3.0;
  CHECK((spd_vech(order) - vec({0, 0, 0, 0, 2 * std::sqrt(2.0), 3 * std::sqrt(2.0)})).norm() < 1e-15);

  Random rng(4);
  for (int i = 0; i < 200; ++i) {
    const int p = rng.integer(1, 6);
    const Matrix s = rng.symmetric(p);
    CHECK((spd_unvech(spd_vech(s)) - s).norm() < 1e-15 * std::max(1.0, s.norm()));
    CHECK(spd_vech(s).norm() == doctest::Approx(s.norm()).epsilon(1e-13));
  }
}

TEST_CASE("spd mean examples") {
  const double e2 = std::exp(2.0);
  const std::vector<Point> cancel{SpdPoint{Vector(vec({e2, 1.0})).asDiagonal()},
                                  SpdPoint{Vector(vec({1.0 / e2, 1.0})).asDiagonal()}};
  CHECK((spd_mean(cancel, SpdMetric::log_euclidean) - Matrix::Identity(2, 2)).norm() < 1e-14);

  Random rng(21);
  const Matrix a = rng.spd(3);
  const std::vector<Point> twice{SpdPoint{a}, SpdPoint{a}};
  CHECK((spd_mean(twice, SpdMetric::euclidean) - a).norm() < 1e-14);
  CHECK((spd_mean(twice, SpdMetric::log_euclidean) - a).norm() < 1e-12 * a.norm());

  const std::vector<Point> diag{SpdPoint{Matrix::Identity(2, 2)},
                                SpdPoint{Vector(vec({3.0, 1.0})).asDiagonal()}};
  CHECK((spd_mean(diag, SpdMetric::euclidean) - Matrix(vec({2.0, 1.0}).asDiagonal())).norm() == 0.0);
}

TEST_CASE("spd distances") {
  Random rng(31);
  const SpdSpace le(3, SpdMetric::log_euclidean);
  const SpdSpace eu(3, SpdMetric::euclidean);
  for (int i = 0; i < 500; ++i) {
    const Matrix a = rng.spd(3);
    const Matrix b = rng.spd(3);
    const double direct = (spd_logm(a) - spd_logm(b)).norm();
    CHECK(std::abs(le.distance(SpdPoint{a}, SpdPoint{b}) - direct) <= 1e-10);
    CHECK(std::abs(eu.distance(SpdPoint{a}, SpdPoint{b}) -
                   std::sqrt(((a - b) * (a - b)).trace())) <= 1e-10);

    // Joint conjugation by an orthogonal matrix preserves the log-Euclidean distance.
    const Matrix o = rng.orthogonal(3);
    Matrix oa = o * a * o.transpose();
    Matrix ob = o * b * o.transpose();
    oa = 0.5 * (oa + oa.transpose());
    ob = 0.5 * (ob + ob.transpose());
    CHECK(std::abs(le.distance(SpdPoint{oa}, SpdPoint{ob}) - direct) <= 1e-10);
  }
}

TEST_CASE("open book distance examples") {
  CHECK(openbook_distance(book(1, {2, 3}), book(1, {2, 7})) == doctest::Approx(4.0));
  CHECK(openbook_distance(book(1, {1, 0}), book(2, {2, 0})) == doctest::Approx(3.0));
  CHECK(openbook_distance(book(1, {1, 3}), book(2, {1, 7})) == doctest::Approx(std::sqrt(20.0)));
  CHECK(openbook_distance(book(1, {1, 3}), book(0, {0, 3})) == doctest::Approx(1.0));
}

TEST_CASE("open book triangle inequality") {
  Random rng(99);
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const Point a = rng.openbook(4, 2, 0.2);
    const Point b = rng.openbook(4, 2, 0.2);
    const Point c = rng.openbook(4, 2, 0.2);
    if (openbook_distance(a, c) > openbook_distance(a, b) + openbook_distance(b, c) + 1e-12) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("open book folding examples") {
  CHECK((openbook_fold(1, book(1, {2, 5})) - vec({2, 5})).norm() == 0.0);
  CHECK((openbook_fold(1, book(3, {2, 5})) - vec({-2, 5})).norm() == 0.0);
  CHECK((openbook_fold(2, book(0, {0, 5})) - vec({0, 5})).norm() == 0.0);
}

TEST_CASE("open book moments examples") {
  std::vector<Point> sample;
  for (int i = 0; i < 6; ++i) sample.push_back(book(1, {1}));
  for (int i = 0; i < 2; ++i) sample.push_back(book(2, {1}));
  for (int i = 0; i < 2; ++i) sample.push_back(book(3, {1}));
  const OpenBookMoments m = openbook_moments(sample, 3);
  CHECK(m.folded_means[0] == doctest::Approx(0.2));
  CHECK(m.folded_means[1] == doctest::Approx(-0.6));
  CHECK(m.folded_means[2] == doctest::Approx(-0.6));
  CHECK(m.weights[0] == doctest::Approx(0.6));
  CHECK(m.weights[0] + m.weights[1] + m.weights[2] + m.spine_fraction == doctest::Approx(1.0));

  const std::vector<Point> spine{book(0, {0, 1}), book(0, {0, -2})};
  const OpenBookMoments ms = openbook_moments(spine, 3);
  for (double mk : ms.folded_means) CHECK(mk == 0.0);
  CHECK(ms.spine_fraction == 1.0);
  CHECK(ms.spine_mean[0] == doctest::Approx(-0.5));

  const std::vector<Point> two{book(1, {1}), book(1, {3}), book(2, {2})};
  const OpenBookMoments m2 = openbook_moments(two, 2);
  CHECK(m2.folded_means[0] == doctest::Approx(2.0 / 3.0));
  CHECK(m2.folded_means[1] == doctest::Approx(-2.0 / 3.0));
}

TEST_CASE("open book classification examples") {
  OpenBookMoments m;
  m.folded_means = {0.2, -0.6, -0.6};
  CHECK(openbook_classify(m) == OpenBookClass{OpenBookClass::Kind::leaf, 1});
  m.folded_means = {-1.0 / 3, -1.0 / 3, -1.0 / 3};
  CHECK(openbook_classify(m).kind == OpenBookClass::Kind::spine);
  m.folded_means = {0.0, -0.5};
  CHECK(openbook_classify(m) == OpenBookClass{OpenBookClass::Kind::boundary, 1});
}

TEST_CASE("open book exact mean examples") {
  std::vector<Point> sample;
  for (int i = 0; i < 6; ++i) sample.push_back(book(1, {1, 0}));
  for (int i = 0; i < 2; ++i) sample.push_back(book(2, {1, 0}));
  for (int i = 0; i < 2; ++i) sample.push_back(book(3, {1, 0}));
  const auto leaf_mean = std::get<OpenBookPoint>(openbook_frechet_mean(sample, 3));
  CHECK(leaf_mean.leaf == 1);
  CHECK((leaf_mean.coords - vec({0.2, 0.0})).norm() < 1e-15);

  const std::vector<Point> one_each{book(1, {1, 2}), book(2, {1, 4}), book(3, {1, 9})};
  const auto spine_mean = std::get<OpenBookPoint>(openbook_frechet_mean(one_each, 3));
  CHECK(spine_mean.leaf == 0);
  CHECK((spine_mean.coords - vec({0.0, 5.0})).norm() < 1e-15);

  const std::vector<Point> single{book(2, {5, 1})};
  const auto same = std::get<OpenBookPoint>(openbook_frechet_mean(single, 3));
  CHECK(same.leaf == 2);
  CHECK((same.coords - vec({5, 1})).norm() == 0.0);

  const OpenBookSpace space(3, 1);
  const FrechetFit fit = estimate_mean(space, single);
  CHECK(fit.strategy == MeanStrategy::openbook_exact);
  CHECK(std::get<OpenBookPoint>(fit.mean).leaf == 2);
}

TEST_CASE("at most one positive empirical folded mean") {
  Random rng(2718);
  int violations = 0;
  for (int i = 0; i < 10000; ++i) {
    const int leaves = rng.integer(2, 6);
    const int n = rng.integer(1, 40);
    std::vector<Point> sample;
    for (int j = 0; j < n; ++j) sample.push_back(rng.openbook(leaves, 1, 0.1));
    const OpenBookMoments m = openbook_moments(sample, leaves);
    int positive = 0;
    double total = 0.0;
    for (double mk : m.folded_means) {
      positive += mk > 0.0 ? 1 : 0;
      total += mk;
    }
    if (positive > 1) ++violations;
    CHECK(total <= 1e-12);
  }
  CHECK(violations == 0);
}

TEST_CASE("exact open book mean minimizes the Frechet function") {
  Random rng(1618);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const int leaves = rng.integer(2, 4);
    const int d = rng.integer(0, 2);
    const OpenBookSpace space(leaves, d);
    const int n = rng.integer(1, 25);
    std::vector<Point> sample;
    for (int j = 0; j < n; ++j) sample.push_back(rng.openbook(leaves, d, 0.1));
    const Point mean = openbook_frechet_mean(sample, leaves);
    const double best = frechet_value(space, sample, mean);
    for (int c = 0; c < 100; ++c) {
      // Candidates: random points and small perturbations of the mean.
      Point candidate = rng.openbook(leaves, d, 0.2);
      if (c % 2 == 1) {
        OpenBookPoint near = std::get<OpenBookPoint>(mean);
        for (Eigen::Index r = 1; r < near.coords.size(); ++r) near.coords[r] += 0.05 * rng.normal();
        near.coords[0] = std::abs(near.coords[0] + 0.05 * rng.normal());
        near.leaf = near.coords[0] == 0.0 ? 0 : (near.leaf == 0 ? rng.integer(1, leaves) : near.leaf);
        candidate = near;
      }
      if (best > frechet_value(space, sample, candidate) + 1e-12) ++violations;
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("open book charts") {
  const OpenBookSpace space(3, 2);
  const Point leaf_point = book(2, {1.5, 0.3, -1.0});
  const ChartPtr leaf_chart = space.chart_at(leaf_point);
  CHECK(leaf_chart->dim() == 3);
  CHECK((leaf_chart->forward(leaf_point) - vec({1.5, 0.3, -1.0})).norm() == 0.0);

  const Point spine_point = book(0, {0.0, 0.3, -1.0});
  const ChartPtr spine_chart = space.chart_at(spine_point);
  CHECK(spine_chart->dim() == 2);
  const Point other = book(1, {2.0, 1.0, 1.0});
  const Vector x = vec({0.5, 0.5});
  const double d = space.distance(spine_chart->inverse(x), other);
  CHECK(spine_chart->h(x, other) == doctest::Approx(d * d));
  CHECK(kind_thrown([&] { space.validate(SpherePoint{Vector::Unit(3, 0)}); }) ==
        ErrorKind::MixedSpacePoints);
}

TEST_CASE("euclidean space basics") {
  const EuclideanSpace r2(2);
  const std::vector<Point> sample{EuclideanPoint{vec({0, 0})}, EuclideanPoint{vec({2, 0})},
                                  EuclideanPoint{vec({1, 3})}};
  const FrechetFit fit = estimate_mean(r2, sample);
  CHECK((std::get<EuclideanPoint>(fit.mean).coords - vec({1, 1})).norm() < 1e-15);
  CHECK(kind_thrown([&] { r2.validate(EuclideanPoint{vec({1, 2, 3})}); }) == ErrorKind::InvalidPoint);
}
