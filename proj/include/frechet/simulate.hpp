#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "frechet/estimator.hpp"
#include "frechet/spaces/openbook.hpp"

namespace frechet {

/// Random stream keyed by (seed, replication, stream). Any replication can be
/// regenerated on its own, independent of the order replications run in.
/// The variate transforms are spelled out here rather than taken from
/// <random> so that streams are bit-identical across standard libraries.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t replication, std::uint64_t stream);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal();
  double exponential(double rate);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct GaussianDistribution {
  Vector mean;
  Matrix cov;
};

/// Uniform (surface measure) on the geodesic ball of the given radius.
struct SphereCapDistribution {
  Vector center;
  double radius = 0.0;
};

/// Mass 1/2 at each of Exp_c(+angle u) and Exp_c(-angle u).
struct SphereTwoPointDistribution {
  Vector center;
  Vector direction;
  double angle = 0.0;
};

/// expm(mean_log + B) with vech(B) ~ N(0, scale^2 I).
struct SpdLogNormalDistribution {
  Matrix mean_log;
  double scale = 0.0;
};

enum class ZerothFamily { exponential, half_gaussian, constant };

/// x0 from a nonnegative family (rate, scale or value in `parameter`), and
/// (x1..xD) ~ N(rest_mean, rest_sd^2 I).
struct LeafDistribution {
  ZerothFamily family = ZerothFamily::exponential;
  double parameter = 1.0;
  Vector rest_mean;
  double rest_sd = 1.0;
};

struct OpenBookDistribution {
  std::vector<double> leaf_probs;
  std::vector<LeafDistribution> leaves;
};

struct PointMassDistribution {
  Point point;
};

using Distribution = std::variant<GaussianDistribution, SphereCapDistribution,
                                  SphereTwoPointDistribution, SpdLogNormalDistribution,
                                  OpenBookDistribution, PointMassDistribution>;

struct Sampler {
  Distribution distribution;
  std::uint64_t seed = 0;
};

/// Throws InvalidDescriptor when the distribution's parameters are invalid.
void validate_sampler(const Sampler& sampler);

std::vector<Point> draw(const Sampler& sampler, std::size_t n, std::uint64_t replication = 0,
                        std::uint64_t stream = 0);
std::vector<Point> draw_with(const Distribution& distribution, std::size_t n, Rng& rng);

/// The population Frechet mean of the sampler's distribution under the
/// space's metric, in closed form. Throws InvalidDescriptor when no closed
/// form applies.
Point population_mean(const Sampler& sampler, const Space& space);

OpenBookMoments population_moments(const OpenBookDistribution& distribution);
/// Population variance of the zero-th coordinate after folding onto leaf k.
double folded_zeroth_variance(const OpenBookDistribution& distribution, int k);

struct MCReport {
  std::string experiment;
  std::size_t reps = 0;
  std::size_t failures = 0;
  /// Replications with outcome 1 (covered, rejected, or on the spine).
  std::size_t successes = 0;
  double estimate = 0.0;
  /// sqrt(p (1 - p) / R) over the replications that did not fail.
  double std_error = 0.0;
  /// Per replication; -1 marks a failed replication.
  std::vector<int> outcomes;
  /// Per-replication real summary (statistic, or x0 of the mean); NaN if failed.
  std::vector<double> values;
  std::map<std::string, double> fractions;
  /// Degrees of freedom of the test statistic (type1 only).
  int dof = 0;
};

struct MCOptions {
  EstimateOptions estimate;
  /// More failed replications than this fraction is a hard failure.
  double max_failure_fraction = 0.01;
};

/// Fraction of replications whose (1 - alpha) sandwich ellipsoid contains the
/// true chart mean.
MCReport mc_coverage(const Space& space, const Sampler& sampler, std::size_t n, std::size_t reps,
                     double alpha, const MCOptions& options = {});

/// Where the exact open-book sample mean lands. outcomes hold 0 for the spine
/// and k for leaf k; values hold x0 of the sample mean; estimate is the spine
/// fraction.
MCReport mc_stickiness(const OpenBookSpace& space, const Sampler& sampler, std::size_t n,
                       std::size_t reps);

/// Rejection rate of the two-sample test when both groups come from the same
/// sampler. With `shared_stream` both groups reuse one random stream, so the
/// groups coincide.
MCReport mc_type1(const Space& space, const Sampler& sampler, std::size_t n1, std::size_t n2,
                  std::size_t reps, double alpha, bool shared_stream = false,
                  const MCOptions& options = {});

struct ConsistencyRow {
  std::size_t n = 0;
  double median_error = 0.0;
  std::size_t failures = 0;
};

/// Median over replications of rho(mu_n, mu) at each sample size. Every chart
/// used here is an isometry at the true mean, so this is also the chart error.
std::vector<ConsistencyRow> mc_consistency(const Space& space, const Sampler& sampler,
                                           std::span<const std::size_t> n_grid, std::size_t reps,
                                           const MCOptions& options = {});

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against a continuous CDF, with the
/// asymptotic Kolmogorov distribution and Stephens' small-sample correction.
KsResult ks_test(std::vector<double> values, const std::function<double(double)>& cdf);

}  // namespace frechet
