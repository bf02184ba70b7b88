#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "frechet/spaces/spd.hpp"

namespace frechet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitNoConvergence = 3;
inline constexpr int kExitPartialFailure = 4;

/// Malformed input. `line` is 1-based, 0 when the error is not tied to a line.
class InputError : public std::runtime_error {
 public:
  InputError(std::size_t line, const std::string& message);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Runs one command line (without the program name) and returns the exit
/// code. Results go to `out` unless --output names a file; diagnostics go to
/// `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Synthetic fiber-tract study: two groups of subjects, one SPD(3) tensor per
/// subject and site. Log-tensors are a site-dependent anisotropic base plus
/// isotropic Gaussian noise in vech coordinates; group 1 is shifted toward
/// isotropy at the effect sites.
struct FiberConfig {
  int group0 = 28;
  int group1 = 18;
  int sites = 75;
  int effect_first = 10;
  int effect_last = 20;
  /// Shift at the effect sites in units of the noise sd.
  double effect_size = 2.0;
  double noise_sd = 0.1;
  std::uint64_t seed = 1;
};

std::string generate_fiber_csv(const FiberConfig& config);

struct FiberDataset {
  std::vector<std::string> subjects;
  std::vector<int> groups;
  int sites = 0;
  /// tensors[subject][site]
  std::vector<std::vector<Matrix>> tensors;
};

/// Parses subject,group,site,a11,a12,a13,a22,a23,a33 rows. Throws InputError.
FiberDataset parse_fiber_dataset(std::istream& in);

struct SiteTestResult {
  int site = 0;
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  /// p < 1e-5, where the chi-square approximation is least trustworthy.
  bool tiny_p = false;
  bool bh_rejected = false;
  bool bonferroni_rejected = false;
  /// The group covariance was near singular; the site is left out of the
  /// multiple-testing family.
  bool failed = false;
};

struct FiberAnalysis {
  SpdMetric metric = SpdMetric::log_euclidean;
  double alpha = 0.05;
  std::vector<SiteTestResult> sites;
  double bonferroni_global_p = 1.0;
  std::size_t bonferroni_rejections = 0;
  std::size_t bh_rejections = 0;
};

FiberAnalysis analyze_fiber(const FiberDataset& data, SpdMetric metric, double alpha);
void write_fiber_csv(const FiberAnalysis& analysis, std::ostream& out);

}  // namespace frechet::cli
