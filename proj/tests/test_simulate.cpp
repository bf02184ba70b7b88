#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "frechet/simulate.hpp"
#include "support.hpp"

using namespace frechet;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

Sampler gaussian(int dim, std::uint64_t seed) {
  return {GaussianDistribution{Vector::LinSpaced(dim, -1.0, 1.0), Matrix::Identity(dim, dim)}, seed};
}

LeafDistribution leaf(ZerothFamily family, double parameter, int d) {
  return {family, parameter, Vector::Zero(d), 1.0};
}

bool same_points(const std::vector<Point>& a, const std::vector<Point>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].index() != b[i].index()) return false;
    const bool equal = std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          const T& y = std::get<T>(b[i]);
          if constexpr (std::is_same_v<T, EuclideanPoint>) return x.coords == y.coords;
          if constexpr (std::is_same_v<T, SpherePoint>) return x.unit == y.unit;
          if constexpr (std::is_same_v<T, SpdPoint>) return x.matrix == y.matrix;
          if constexpr (std::is_same_v<T, OpenBookPoint>) return x.leaf == y.leaf && x.coords == y.coords;
        },
        a[i]);
    if (!equal) return false;
  }
  return true;
}

ErrorKind kind_of_error(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("rng streams are keyed and deterministic") {
  Rng a(7, 3, 1);
  Rng b(7, 3, 1);
  Rng c(7, 3, 2);
  Rng d(7, 4, 1);
  bool differs_c = false;
  bool differs_d = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    differs_c = differs_c || x != c.uniform();
    differs_d = differs_d || x != d.uniform();
  }
  CHECK(differs_c);
  CHECK(differs_d);

  Rng moments(1, 0, 0);
  double sum = 0.0;
  double sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = moments.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.02);
}

TEST_CASE("draw examples") {
  const OpenBookDistribution one_leaf{{1.0, 0.0, 0.0},
                                      {leaf(ZerothFamily::exponential, 1.0, 2),
                                       leaf(ZerothFamily::exponential, 1.0, 2),
                                       leaf(ZerothFamily::exponential, 1.0, 2)}};
  for (const Point& p : draw({one_leaf, 3}, 500)) CHECK(std::get<OpenBookPoint>(p).leaf == 1);

  const Vector north = Vector::Unit(3, 2);
  for (const Point& p : draw({SphereCapDistribution{north, 0.0}, 4}, 50))
    CHECK((std::get<SpherePoint>(p).unit - north).norm() == 0.0);

  const Sampler s = gaussian(3, 99);
  CHECK(same_points(draw(s, 40, 5), draw(s, 40, 5)));
  CHECK_FALSE(same_points(draw(s, 40, 5), draw(s, 40, 6)));

  const Sampler spd{SpdLogNormalDistribution{Matrix::Zero(3, 3), 0.3}, 8};
  CHECK(same_points(draw(spd, 20), draw(spd, 20)));
  for (const Point& p : draw(spd, 20)) CHECK_NOTHROW(make_spd(std::get<SpdPoint>(p).matrix));
}

TEST_CASE("sphere cap draws stay in the cap and are uniform in area") {
  const Vector center = vec({0.0, 0.6, 0.8});
  const double radius = 0.5;
  const std::vector<Point> pts = draw({SphereCapDistribution{center, radius}, 12}, 20000);
  double below_half_area = 0.0;
  // Half of the cap area lies within the angle t with 1 - cos t = (1 - cos r)/2.
  const double t = std::acos(1.0 - 0.5 * (1.0 - std::cos(radius)));
  for (const Point& p : pts) {
    const double angle = sphere_geodesic_distance(std::get<SpherePoint>(p).unit, center);
    CHECK(angle <= radius + 1e-12);
    if (angle <= t) below_half_area += 1.0;
  }
  CHECK(std::abs(below_half_area / 20000.0 - 0.5) < 0.015);

  const std::vector<Point> s4 = draw({SphereCapDistribution{Vector::Unit(5, 0), 0.7}, 2}, 2000);
  for (const Point& p : s4) {
    CHECK(std::abs(std::get<SpherePoint>(p).unit.norm() - 1.0) < 1e-12);
    CHECK(sphere_geodesic_distance(std::get<SpherePoint>(p).unit, Vector::Unit(5, 0)) <= 0.7 + 1e-12);
  }
}

TEST_CASE("invalid descriptors") {
  CHECK(kind_of_error([] { draw({SphereCapDistribution{Vector::Unit(3, 0), -0.1}, 1}, 5); }) ==
        ErrorKind::InvalidDescriptor);
  CHECK(kind_of_error([] {
          draw({OpenBookDistribution{{0.5, 0.6}, {leaf(ZerothFamily::exponential, 1.0, 0),
                                                  leaf(ZerothFamily::exponential, 1.0, 0)}},
                1},
               5);
        }) == ErrorKind::InvalidDescriptor);
  CHECK(kind_of_error([] {
          draw({GaussianDistribution{vec({0, 0}), (Matrix(2, 2) << 1, 0, 0, -1).finished()}, 1}, 5);
        }) == ErrorKind::InvalidDescriptor);
  const SpdSpace eu(3, SpdMetric::euclidean);
  CHECK(kind_of_error([&] {
          population_mean({SpdLogNormalDistribution{Matrix::Zero(3, 3), 0.2}, 1}, eu);
        }) == ErrorKind::InvalidDescriptor);
}

TEST_CASE("population moments of the open book") {
  const OpenBookDistribution lead{{0.6, 0.2, 0.2},
                                  {leaf(ZerothFamily::constant, 1.0, 2), leaf(ZerothFamily::constant, 1.0, 2),
                                   leaf(ZerothFamily::constant, 1.0, 2)}};
  const OpenBookMoments m = population_moments(lead);
  CHECK(m.folded_means[0] == doctest::Approx(0.2));
  CHECK(m.folded_means[1] == doctest::Approx(-0.6));
  CHECK(folded_zeroth_variance(lead, 1) == doctest::Approx(1.0 - 0.04));

  const OpenBookSpace book(3, 2);
  const auto mean = std::get<OpenBookPoint>(population_mean({lead, 1}, book));
  CHECK(mean.leaf == 1);
  CHECK(mean.coords[0] == doctest::Approx(0.2));

  const OpenBookDistribution boundary{{0.5, 0.25, 0.25},
                                      {leaf(ZerothFamily::exponential, 1.0, 2),
                                       leaf(ZerothFamily::exponential, 1.0, 2),
                                       leaf(ZerothFamily::exponential, 1.0, 2)}};
  const OpenBookMoments b = population_moments(boundary);
  CHECK(b.folded_means[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(openbook_classify(b).kind == OpenBookClass::Kind::boundary);
  CHECK(folded_zeroth_variance(boundary, 1) == doctest::Approx(2.0));
  CHECK(std::get<OpenBookPoint>(population_mean({boundary, 1}, book)).leaf == 0);
}

TEST_CASE("coverage at alpha = 0.5 is about one half") {
  const EuclideanSpace r2(2);
  const MCReport r = mc_coverage(r2, gaussian(2, 5), 100, 800, 0.5);
  CHECK(r.reps == 800);
  CHECK(r.failures == 0);
  CHECK(std::abs(r.estimate - 0.5) <= 3.0 * std::sqrt(0.25 / 800));
  CHECK(r.std_error == doctest::Approx(std::sqrt(r.estimate * (1 - r.estimate) / 800)));
}

TEST_CASE("coverage booleans agree for analytic and numeric derivatives") {
  const EuclideanSpace r3(3);
  MCOptions numeric;
  numeric.estimate.derivatives = DerivativeMode::numeric;
  const MCReport a = mc_coverage(r3, gaussian(3, 9), 60, 300, 0.05);
  const MCReport b = mc_coverage(r3, gaussian(3, 9), 60, 300, 0.05, numeric);
  CHECK(a.outcomes == b.outcomes);
}

TEST_CASE("monte carlo reports are deterministic") {
  const SphereSpace s2(2, SphereMetric::intrinsic);
  const Sampler cap{SphereCapDistribution{Vector::Unit(3, 2), 0.5}, 31};
  const MCReport a = mc_coverage(s2, cap, 50, 50, 0.05);
  const MCReport b = mc_coverage(s2, cap, 50, 50, 0.05);
  CHECK(a.outcomes == b.outcomes);
  for (std::size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
}

TEST_CASE("type-I sanity mode with shared streams never rejects") {
  const SpdSpace le(3, SpdMetric::log_euclidean);
  const Sampler s{SpdLogNormalDistribution{Matrix::Zero(3, 3), 0.2}, 3};
  const MCReport r = mc_type1(le, s, 30, 30, 100, 0.05, true);
  CHECK(r.estimate == 0.0);
  CHECK(r.dof == 6);
}

TEST_CASE("stickiness on a spine-sticky law") {
  const OpenBookSpace book(3, 2);
  const OpenBookDistribution spine{{1.0 / 3, 1.0 / 3, 1.0 / 3},
                                   {leaf(ZerothFamily::constant, 1.0, 2), leaf(ZerothFamily::constant, 1.0, 2),
                                    leaf(ZerothFamily::constant, 1.0, 2)}};
  const MCReport r = mc_stickiness(book, {spine, 4}, 100, 200);
  CHECK(r.fractions.at("spine") >= 0.99);
  CHECK(r.fractions.at("spine") + r.fractions.at("leaf1") + r.fractions.at("leaf2") + r.fractions.at("leaf3") ==
        doctest::Approx(1.0));
}

TEST_CASE("point mass consistency error is zero") {
  const EuclideanSpace r2(2);
  const std::vector<std::size_t> grid{5, 50};
  for (const ConsistencyRow& row :
       mc_consistency(r2, {PointMassDistribution{EuclideanPoint{vec({1.0, 2.0})}}, 1}, grid, 10))
    CHECK(row.median_error == 0.0);
}

TEST_CASE("too many failed replications is a hard failure") {
  // A point mass has zero sandwich covariance, so every confidence statistic
  // fails.
  const SphereSpace s2(2, SphereMetric::intrinsic);
  const Sampler mass{PointMassDistribution{SpherePoint{Vector::Unit(3, 1)}}, 1};
  CHECK(kind_of_error([&] { mc_coverage(s2, mass, 10, 20, 0.05); }) == ErrorKind::NearSingularCovariance);
}

TEST_CASE("ks test") {
  std::vector<double> uniform;
  for (int i = 0; i < 1000; ++i) uniform.push_back((i + 0.5) / 1000.0);
  const KsResult ok = ks_test(uniform, [](double x) { return std::clamp(x, 0.0, 1.0); });
  CHECK(ok.statistic == doctest::Approx(0.0005));
  CHECK(ok.p_value > 0.99);

  std::vector<double> shifted;
  for (int i = 0; i < 1000; ++i) shifted.push_back(std::pow((i + 0.5) / 1000.0, 2.0));
  const KsResult bad = ks_test(shifted, [](double x) { return std::clamp(x, 0.0, 1.0); });
  CHECK(bad.p_value < 1e-6);
}
