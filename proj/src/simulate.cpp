#include "frechet/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "frechet/inference.hpp"
#include "frechet/spaces/sphere.hpp"
#include "frechet/spaces/spd.hpp"

namespace frechet {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t replication, std::uint64_t stream) {
  return splitmix64(splitmix64(splitmix64(seed) ^ replication) ^ (stream + 0x632be59bd9b4e019ULL));
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t replication, std::uint64_t stream)
    : engine_(stream_key(seed, replication, stream)) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; 1 - u lies in (0, 1].
  const double radius = std::sqrt(-2.0 * std::log(1.0 - uniform()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

double Rng::exponential(double rate) { return -std::log(1.0 - uniform()) / rate; }

namespace {

[[noreturn]] void bad_descriptor(const std::string& message) {
  throw Error(ErrorKind::InvalidDescriptor, message);
}

struct Validator {
  void operator()(const GaussianDistribution& g) const {
    if (g.mean.size() < 1) bad_descriptor("gaussian mean is empty");
    if (g.cov.rows() != g.mean.size() || g.cov.cols() != g.mean.size())
      bad_descriptor("gaussian covariance has wrong shape");
    if ((g.cov - g.cov.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      bad_descriptor("gaussian covariance is not symmetric");
    const SymmetricEigen eig = jacobi_eigen(g.cov);
    if (eig.values.minCoeff() < -1e-12 * std::max(1.0, eig.values.cwiseAbs().maxCoeff()))
      bad_descriptor("gaussian covariance is not positive semidefinite");
  }
  void operator()(const SphereCapDistribution& c) const {
    if (c.center.size() < 2 || std::abs(c.center.norm() - 1.0) > kUnitNormTolerance)
      bad_descriptor("cap center must be a unit vector in R^{d+1}, d >= 1");
    if (!(c.radius >= 0.0 && c.radius <= std::numbers::pi))
      bad_descriptor("cap radius must lie in [0, pi]");
  }
  void operator()(const SphereTwoPointDistribution& t) const {
    if (t.center.size() < 2 || std::abs(t.center.norm() - 1.0) > kUnitNormTolerance)
      bad_descriptor("two-point center must be a unit vector");
    if (t.direction.size() != t.center.size()) bad_descriptor("direction has wrong dimension");
    if ((t.direction - t.direction.dot(t.center) * t.center).norm() < 1e-12)
      bad_descriptor("direction has no tangent component");
    if (!(t.angle >= 0.0 && t.angle <= std::numbers::pi)) bad_descriptor("angle must lie in [0, pi]");
  }
  void operator()(const SpdLogNormalDistribution& s) const {
    if (s.mean_log.rows() < 1 || s.mean_log.rows() != s.mean_log.cols())
      bad_descriptor("mean_log must be square");
    if ((s.mean_log - s.mean_log.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance)
      bad_descriptor("mean_log must be symmetric");
    if (!(s.scale >= 0.0)) bad_descriptor("scale must be >= 0");
  }
  void operator()(const OpenBookDistribution& o) const {
    if (o.leaf_probs.size() < 2) bad_descriptor("open book needs at least two leaves");
    if (o.leaves.size() != o.leaf_probs.size())
      bad_descriptor("one leaf distribution per leaf probability is required");
    double total = 0.0;
    for (double p : o.leaf_probs) {
      if (!(p >= 0.0)) bad_descriptor("negative leaf probability");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) bad_descriptor("leaf probabilities must sum to 1");
    const Eigen::Index d = o.leaves.front().rest_mean.size();
    for (const LeafDistribution& leaf : o.leaves) {
      if (leaf.rest_mean.size() != d) bad_descriptor("leaf rest_mean sizes differ");
      if (!(leaf.rest_sd >= 0.0)) bad_descriptor("rest_sd must be >= 0");
      if (!(leaf.parameter > 0.0)) bad_descriptor("x0 family parameter must be > 0");
    }
  }
  void operator()(const PointMassDistribution&) const {}
};

struct Drawer {
  std::size_t n;
  Rng& rng;

  std::vector<Point> operator()(const GaussianDistribution& g) const {
    const SymmetricEigen eig = jacobi_eigen(g.cov);
    const Matrix root = eig.vectors * eig.values.cwiseMax(0.0).cwiseSqrt().asDiagonal();
    std::vector<Point> out;
    out.reserve(n);
    Vector z(g.mean.size());
    for (std::size_t j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
      out.push_back(EuclideanPoint{g.mean + root * z});
    }
    return out;
  }

  std::vector<Point> operator()(const SphereCapDistribution& c) const {
    const auto d = static_cast<int>(c.center.size()) - 1;
    const Matrix basis = sphere_tangent_basis(c.center);
    std::vector<Point> out;
    out.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
      Vector dir(d);
      do {
        for (int i = 0; i < d; ++i) dir[i] = rng.normal();
      } while (dir.norm() == 0.0);
      dir /= dir.norm();
      out.push_back(SpherePoint{sphere_exp(c.center, cap_angle(c.radius, d) * (basis * dir))});
    }
    return out;
  }

  // Geodesic radius with density proportional to sin^{d-1}(theta) on [0, r].
  double cap_angle(double r, int d) const {
    if (d == 1) return r * rng.uniform();
    if (d == 2) return std::acos(1.0 - rng.uniform() * (1.0 - std::cos(r)));
    const double peak = std::pow(std::sin(std::min(r, std::numbers::pi / 2)), d - 1);
    while (true) {
      const double theta = r * rng.uniform();
      if (rng.uniform() * peak <= std::pow(std::sin(theta), d - 1)) return theta;
    }
  }

  std::vector<Point> operator()(const SphereTwoPointDistribution& t) const {
    Vector dir = t.direction - t.direction.dot(t.center) * t.center;
    dir /= dir.norm();
    const Vector plus = sphere_exp(t.center, t.angle * dir);
    const Vector minus = sphere_exp(t.center, -t.angle * dir);
    std::vector<Point> out;
    out.reserve(n);
    for (std::size_t j = 0; j < n; ++j)
      out.push_back(SpherePoint{rng.uniform() < 0.5 ? plus : minus});
    return out;
  }

  std::vector<Point> operator()(const SpdLogNormalDistribution& s) const {
    const Eigen::Index p = s.mean_log.rows();
    const Eigen::Index dim = p * (p + 1) / 2;
    std::vector<Point> out;
    out.reserve(n);
    Vector z(dim);
    for (std::size_t j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < dim; ++i) z[i] = s.scale * rng.normal();
      out.push_back(SpdPoint{spd_expm(s.mean_log + spd_unvech(z))});
    }
    return out;
  }

  std::vector<Point> operator()(const OpenBookDistribution& o) const {
    const Eigen::Index d = o.leaves.front().rest_mean.size();
    std::vector<Point> out;
    out.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double u = rng.uniform();
      std::size_t leaf = 0;
      double cumulative = o.leaf_probs[0];
      while (u >= cumulative && leaf + 1 < o.leaf_probs.size()) cumulative += o.leaf_probs[++leaf];
      // Skip leaves of probability zero that a rounding tail could select.
      while (o.leaf_probs[leaf] == 0.0 && leaf > 0) --leaf;
      const LeafDistribution& dist = o.leaves[leaf];
      Vector coords(d + 1);
      switch (dist.family) {
        case ZerothFamily::exponential: coords[0] = rng.exponential(dist.parameter); break;
        case ZerothFamily::half_gaussian: coords[0] = std::abs(rng.normal()) * dist.parameter; break;
        case ZerothFamily::constant: coords[0] = dist.parameter; break;
      }
      for (Eigen::Index i = 0; i < d; ++i) coords[i + 1] = dist.rest_mean[i] + dist.rest_sd * rng.normal();
      out.push_back(make_openbook(static_cast<int>(leaf) + 1, coords));
    }
    return out;
  }

  std::vector<Point> operator()(const PointMassDistribution& m) const {
    return std::vector<Point>(n, m.point);
  }
};

double family_mean(const LeafDistribution& leaf) {
  switch (leaf.family) {
    case ZerothFamily::exponential: return 1.0 / leaf.parameter;
    case ZerothFamily::half_gaussian: return leaf.parameter * std::sqrt(2.0 / std::numbers::pi);
    case ZerothFamily::constant: return leaf.parameter;
  }
  return 0.0;
}

double family_second_moment(const LeafDistribution& leaf) {
  switch (leaf.family) {
    case ZerothFamily::exponential: return 2.0 / (leaf.parameter * leaf.parameter);
    case ZerothFamily::half_gaussian: return leaf.parameter * leaf.parameter;
    case ZerothFamily::constant: return leaf.parameter * leaf.parameter;
  }
  return 0.0;
}

}  // namespace

void validate_sampler(const Sampler& sampler) { std::visit(Validator{}, sampler.distribution); }

std::vector<Point> draw_with(const Distribution& distribution, std::size_t n, Rng& rng) {
  return std::visit(Drawer{n, rng}, distribution);
}

std::vector<Point> draw(const Sampler& sampler, std::size_t n, std::uint64_t replication,
                        std::uint64_t stream) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "draw needs n >= 1");
  validate_sampler(sampler);
  Rng rng(sampler.seed, replication, stream);
  return draw_with(sampler.distribution, n, rng);
}

OpenBookMoments population_moments(const OpenBookDistribution& o) {
  OpenBookMoments out;
  out.leaves = static_cast<int>(o.leaf_probs.size());
  out.spine_dim = static_cast<int>(o.leaves.front().rest_mean.size());
  double total = 0.0;
  for (std::size_t k = 0; k < o.leaf_probs.size(); ++k) total += o.leaf_probs[k] * family_mean(o.leaves[k]);
  out.spine_mean = Vector::Zero(out.spine_dim);
  for (std::size_t k = 0; k < o.leaf_probs.size(); ++k) {
    const double own = o.leaf_probs[k] * family_mean(o.leaves[k]);
    out.weights.push_back(o.leaf_probs[k]);
    out.folded_means.push_back(2.0 * own - total);
    out.spine_mean += o.leaf_probs[k] * o.leaves[k].rest_mean;
  }
  return out;
}

double folded_zeroth_variance(const OpenBookDistribution& o, int k) {
  if (k < 1 || k > static_cast<int>(o.leaf_probs.size()))
    throw Error(ErrorKind::InvalidArgument, "leaf index out of range");
  double second = 0.0;
  for (std::size_t i = 0; i < o.leaf_probs.size(); ++i)
    second += o.leaf_probs[i] * family_second_moment(o.leaves[i]);
  const double m = population_moments(o).folded_means[static_cast<std::size_t>(k - 1)];
  return second - m * m;
}

Point population_mean(const Sampler& sampler, const Space& space) {
  validate_sampler(sampler);
  const Distribution& dist = sampler.distribution;
  if (const auto* g = std::get_if<GaussianDistribution>(&dist)) {
    if (space.kind() != PointKind::euclidean) bad_descriptor("gaussian sampler needs a euclidean space");
    return EuclideanPoint{g->mean};
  }
  if (const auto* c = std::get_if<SphereCapDistribution>(&dist)) {
    if (space.kind() != PointKind::sphere) bad_descriptor("cap sampler needs a sphere");
    if (!(c->radius < std::numbers::pi / 2)) bad_descriptor("cap radius must be < pi/2 for a unique mean");
    return SpherePoint{c->center};
  }
  if (const auto* t = std::get_if<SphereTwoPointDistribution>(&dist)) {
    if (space.kind() != PointKind::sphere) bad_descriptor("two-point sampler needs a sphere");
    if (!(t->angle < std::numbers::pi / 2)) bad_descriptor("angle must be < pi/2 for a unique mean");
    return SpherePoint{t->center};
  }
  if (const auto* s = std::get_if<SpdLogNormalDistribution>(&dist)) {
    const auto* spd = dynamic_cast<const SpdSpace*>(&space);
    if (spd == nullptr) bad_descriptor("spd sampler needs an spd space");
    if (spd->metric() == SpdMetric::euclidean && s->scale != 0.0)
      bad_descriptor("the euclidean-metric mean of a log-normal SPD law has no closed form");
    return SpdPoint{spd_expm(s->mean_log)};
  }
  if (const auto* o = std::get_if<OpenBookDistribution>(&dist)) {
    if (space.kind() != PointKind::openbook) bad_descriptor("open book sampler needs an open book");
    const OpenBookMoments m = population_moments(*o);
    const OpenBookClass cls = openbook_classify(m);
    Vector coords(m.spine_dim + 1);
    coords[0] = 0.0;
    coords.tail(m.spine_dim) = m.spine_mean;
    if (cls.kind == OpenBookClass::Kind::leaf) {
      coords[0] = m.folded_means[static_cast<std::size_t>(cls.leaf - 1)];
      return OpenBookPoint{cls.leaf, coords};
    }
    return OpenBookPoint{0, coords};
  }
  const Point& p = std::get<PointMassDistribution>(dist).point;
  space.validate(p);
  return p;
}

namespace {

bool is_replication_failure(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::NoConvergence:
    case ErrorKind::NearSingularHessian:
    case ErrorKind::NearSingularCovariance:
    case ErrorKind::CutLocus:
    case ErrorKind::NonUniqueProjection:
      return true;
    default:
      return false;
  }
}

// Tallies outcome == 1 over successful replications and applies the failure
// policy.
void finish_binary(MCReport& report, const MCOptions& options, std::optional<ErrorKind> first_failure) {
  if (report.failures > 0 &&
      static_cast<double>(report.failures) > options.max_failure_fraction * static_cast<double>(report.reps))
    throw Error(first_failure.value_or(ErrorKind::NoConvergence),
                report.experiment + ": " + std::to_string(report.failures) + " of " +
                    std::to_string(report.reps) + " replications failed");
  report.successes = static_cast<std::size_t>(std::count(report.outcomes.begin(), report.outcomes.end(), 1));
  const std::size_t valid = report.reps - report.failures;
  if (valid == 0) return;
  const double p = static_cast<double>(report.successes) / static_cast<double>(valid);
  report.estimate = p;
  report.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(valid));
}

}  // namespace

MCReport mc_coverage(const Space& space, const Sampler& sampler, std::size_t n, std::size_t reps,
                     double alpha, const MCOptions& options) {
  const Point truth = population_mean(sampler, space);
  MCReport report;
  report.experiment = "coverage";
  report.reps = reps;
  std::optional<ErrorKind> first_failure;
  for (std::size_t r = 0; r < reps; ++r) {
    const std::vector<Point> sample = draw(sampler, n, r);
    try {
      const FrechetFit fit = fit_frechet(space, sample, options.estimate);
      const Vector target = fit.chart->forward(truth);
      const double stat = confidence_statistic(fit, target);
      report.values.push_back(stat);
      report.outcomes.push_back(within_chi2_region(stat, fit.chart->dim(), alpha) ? 1 : 0);
    } catch (const Error& e) {
      if (!is_replication_failure(e)) throw;
      if (!first_failure) first_failure = e.kind();
      ++report.failures;
      report.outcomes.push_back(-1);
      report.values.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  finish_binary(report, options, first_failure);
  return report;
}

MCReport mc_stickiness(const OpenBookSpace& space, const Sampler& sampler, std::size_t n,
                       std::size_t reps) {
  if (!std::holds_alternative<OpenBookDistribution>(sampler.distribution))
    bad_descriptor("stickiness needs an open book sampler");
  MCReport report;
  report.experiment = "stickiness";
  report.reps = reps;
  std::vector<std::size_t> counts(static_cast<std::size_t>(space.leaves()) + 1, 0);
  for (std::size_t r = 0; r < reps; ++r) {
    const std::vector<Point> sample = draw(sampler, n, r);
    space.validate_all(sample);
    const Point fitted = openbook_frechet_mean(sample, space.leaves());
    const auto& mean = std::get<OpenBookPoint>(fitted);
    ++counts[static_cast<std::size_t>(mean.leaf)];
    report.outcomes.push_back(mean.leaf);
    report.values.push_back(mean.coords[0]);
  }
  const double total = static_cast<double>(reps);
  report.fractions["spine"] = static_cast<double>(counts[0]) / total;
  for (int k = 1; k <= space.leaves(); ++k)
    report.fractions["leaf" + std::to_string(k)] = static_cast<double>(counts[static_cast<std::size_t>(k)]) / total;
  report.successes = counts[0];
  report.estimate = report.fractions["spine"];
  report.std_error = std::sqrt(report.estimate * (1.0 - report.estimate) / total);
  return report;
}

MCReport mc_type1(const Space& space, const Sampler& sampler, std::size_t n1, std::size_t n2,
                  std::size_t reps, double alpha, bool shared_stream, const MCOptions& options) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
  MCReport report;
  report.experiment = "type1";
  report.reps = reps;
  std::optional<ErrorKind> first_failure;
  for (std::size_t r = 0; r < reps; ++r) {
    const std::vector<Point> x = draw(sampler, n1, r, 0);
    const std::vector<Point> y = draw(sampler, n2, r, shared_stream ? 0 : 1);
    try {
      const TwoSampleResult result = two_sample_test(space, x, y);
      report.values.push_back(result.p_value);
      report.outcomes.push_back(result.p_value <= alpha ? 1 : 0);
      report.dof = result.dof;
    } catch (const Error& e) {
      if (!is_replication_failure(e)) throw;
      if (!first_failure) first_failure = e.kind();
      ++report.failures;
      report.outcomes.push_back(-1);
      report.values.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  finish_binary(report, options, first_failure);
  return report;
}

std::vector<ConsistencyRow> mc_consistency(const Space& space, const Sampler& sampler,
                                           std::span<const std::size_t> n_grid, std::size_t reps,
                                           const MCOptions& options) {
  const Point truth = population_mean(sampler, space);
  std::vector<ConsistencyRow> rows;
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    ConsistencyRow row;
    row.n = n_grid[g];
    std::vector<double> errors;
    errors.reserve(reps);
    for (std::size_t r = 0; r < reps; ++r) {
      const std::vector<Point> sample = draw(sampler, row.n, r, g);
      try {
        const FrechetFit fit = estimate_mean(space, sample, options.estimate);
        errors.push_back(space.distance(fit.mean, truth));
      } catch (const Error& e) {
        if (!is_replication_failure(e)) throw;
        ++row.failures;
      }
    }
    if (static_cast<double>(row.failures) > options.max_failure_fraction * static_cast<double>(reps))
      throw Error(ErrorKind::NoConvergence, "consistency: too many failed replications at n = " +
                                                std::to_string(row.n));
    if (errors.empty()) throw Error(ErrorKind::InvalidArgument, "consistency needs reps >= 1");
    std::sort(errors.begin(), errors.end());
    const std::size_t m = errors.size();
    row.median_error = m % 2 == 1 ? errors[m / 2] : 0.5 * (errors[m / 2 - 1] + errors[m / 2]);
    rows.push_back(row);
  }
  return rows;
}

KsResult ks_test(std::vector<double> values, const std::function<double(double)>& cdf) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "KS test needs data");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = cdf(values[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double root = std::sqrt(n);
  const double lambda = (root + 0.12 + 0.11 / root) * d;
  // Q_KS(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2)
  double sum = 0.0;
  double sign = 1.0;
  double previous = 0.0;
  bool converged = false;
  for (int j = 1; j <= 100; ++j) {
    const double term = sign * 2.0 * std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::abs(term) <= 1e-3 * previous || std::abs(term) <= 1e-10 * sum) {
      converged = true;
      break;
    }
    sign = -sign;
    previous = std::abs(term);
  }
  return {d, converged ? std::clamp(sum, 0.0, 1.0) : 1.0};
}

}  // namespace frechet
