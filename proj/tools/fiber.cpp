#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "cli_internal.hpp"
#include "frechet/inference.hpp"
#include "frechet/simulate.hpp"

namespace frechet::cli {
namespace {

Matrix rotation_z(double angle) {
  Matrix r = Matrix::Identity(3, 3);
  r(0, 0) = std::cos(angle);
  r(0, 1) = -std::sin(angle);
  r(1, 0) = std::sin(angle);
  r(1, 1) = std::cos(angle);
  return r;
}

Matrix rotation_x(double angle) {
  Matrix r = Matrix::Identity(3, 3);
  r(1, 1) = std::cos(angle);
  r(1, 2) = -std::sin(angle);
  r(2, 1) = std::sin(angle);
  r(2, 2) = std::cos(angle);
  return r;
}

// Principal diffusion direction bends along the tract.
Matrix site_frame(int site, int sites) {
  const double t = sites > 1 ? static_cast<double>(site) / (sites - 1) : 0.0;
  return rotation_z(0.6 * std::numbers::pi * t) * rotation_x(0.25 * std::numbers::pi * t);
}

constexpr const char* kFiberHeader = "subject,group,site,a11,a12,a13,a22,a23,a33";

}  // namespace

std::string generate_fiber_csv(const FiberConfig& config) {
  if (config.group0 < 1 || config.group1 < 1) throw InputError(0, "both groups need at least one subject");
  if (config.sites < 1) throw InputError(0, "need at least one site");
  if (!(config.noise_sd >= 0.0) || !std::isfinite(config.effect_size))
    throw InputError(0, "noise sd must be >= 0 and effect size finite");

  // Eigenvalues of a typical white-matter tensor, in mm^2/s.
  const Vector base_log = (Vector(3) << std::log(1.6e-3), std::log(0.45e-3), std::log(0.35e-3)).finished();
  // Unit Frobenius direction that lowers the principal eigenvalue and raises
  // the two minor ones.
  const Vector toward_isotropy = (Vector(3) << -2.0, 1.0, 1.0).finished() / std::sqrt(6.0);

  std::vector<Matrix> base(static_cast<std::size_t>(config.sites));
  std::vector<Matrix> shift(static_cast<std::size_t>(config.sites));
  for (int s = 0; s < config.sites; ++s) {
    const Matrix frame = site_frame(s, config.sites);
    base[static_cast<std::size_t>(s)] = frame * base_log.asDiagonal() * frame.transpose();
    shift[static_cast<std::size_t>(s)] = frame * toward_isotropy.asDiagonal() * frame.transpose();
  }

  std::ostringstream out;
  out << kFiberHeader << '\n';
  const int subjects = config.group0 + config.group1;
  for (int j = 0; j < subjects; ++j) {
    const int group = j < config.group0 ? 0 : 1;
    Rng rng(config.seed, static_cast<std::uint64_t>(j), 0);
    char id[32];
    std::snprintf(id, sizeof id, "subj%03d", j + 1);
    for (int s = 0; s < config.sites; ++s) {
      Vector noise(6);
      for (Eigen::Index i = 0; i < 6; ++i) noise[i] = config.noise_sd * rng.normal();
      Matrix log_tensor = base[static_cast<std::size_t>(s)] + spd_unvech(noise);
      if (group == 1 && s >= config.effect_first && s <= config.effect_last)
        log_tensor += config.effect_size * config.noise_sd * shift[static_cast<std::size_t>(s)];
      const Matrix a = spd_expm(symmetrize(log_tensor));
      out << id << ',' << group << ',' << s;
      for (const auto& [r, c] : {std::pair{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}})
        out << ',' << format_double(a(r, c));
      out << '\n';
    }
  }
  return out.str();
}

FiberDataset parse_fiber_dataset(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw InputError(1, "empty dataset; expected header '" + std::string(kFiberHeader) + "'");
  ++line_no;
  if (trim(line) != kFiberHeader)
    throw InputError(1, "unexpected header; expected '" + std::string(kFiberHeader) + "'");

  struct Row {
    std::size_t line;
    Matrix tensor;
  };
  std::map<std::string, std::size_t> subject_index;
  FiberDataset data;
  std::vector<std::map<int, Row>> rows;
  int max_site = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != 9)
      throw InputError(line_no, "expected 9 fields, found " + std::to_string(fields.size()));
    const std::string subject = std::string(trim(fields[0]));
    if (subject.empty()) throw InputError(line_no, "empty subject id");
    const double group = parse_number(fields[1], line_no);
    const double site = parse_number(fields[2], line_no);
    if (group != 0.0 && group != 1.0) throw InputError(line_no, "group must be 0 or 1");
    if (!(site >= 0.0) || site != std::floor(site) || site > 1e6)
      throw InputError(line_no, "site must be a nonnegative integer");
    Vector upper(6);
    for (int i = 0; i < 6; ++i) upper[i] = parse_number(fields[static_cast<std::size_t>(3 + i)], line_no);
    Matrix a(3, 3);
    a << upper[0], upper[1], upper[2], upper[1], upper[3], upper[4], upper[2], upper[4], upper[5];
    try {
      make_spd(a);
    } catch (const Error& e) {
      throw InputError(line_no, std::string("tensor is not SPD (") + e.what() + ")");
    }

    auto [it, inserted] = subject_index.try_emplace(subject, data.subjects.size());
    if (inserted) {
      data.subjects.push_back(subject);
      data.groups.push_back(static_cast<int>(group));
      rows.emplace_back();
    } else if (data.groups[it->second] != static_cast<int>(group)) {
      throw InputError(line_no, "subject " + subject + " changes group");
    }
    const int s = static_cast<int>(site);
    if (!rows[it->second].try_emplace(s, Row{line_no, a}).second)
      throw InputError(line_no, "duplicate row for subject " + subject + " at site " + std::to_string(s));
    max_site = std::max(max_site, s);
  }
  if (data.subjects.empty()) throw InputError(line_no, "dataset has no rows");
  data.sites = max_site + 1;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (static_cast<int>(rows[j].size()) != data.sites)
      throw InputError(0, "subject " + data.subjects[j] + " is missing sites (has " +
                              std::to_string(rows[j].size()) + " of " + std::to_string(data.sites) + ")");
    std::vector<Matrix> tensors;
    for (auto& [site, row] : rows[j]) tensors.push_back(std::move(row.tensor));
    data.tensors.push_back(std::move(tensors));
  }
  return data;
}

FiberAnalysis analyze_fiber(const FiberDataset& data, SpdMetric metric, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError(0, "alpha must lie in (0, 1)");
  const SpdSpace space(3, metric);
  FiberAnalysis out;
  out.metric = metric;
  out.alpha = alpha;

  std::vector<double> pvalues;
  std::vector<std::size_t> tested;
  for (int s = 0; s < data.sites; ++s) {
    std::vector<Point> x;
    std::vector<Point> y;
    for (std::size_t j = 0; j < data.subjects.size(); ++j)
      (data.groups[j] == 0 ? x : y).push_back(SpdPoint{data.tensors[j][static_cast<std::size_t>(s)]});
    if (x.size() < 2 || y.size() < 2) throw InputError(0, "each group needs at least two subjects");

    SiteTestResult row;
    row.site = s;
    row.df = space.chart_dim();
    try {
      const TwoSampleResult r = two_sample_test(space, x, y);
      row.statistic = r.statistic;
      row.df = r.dof;
      row.p_value = r.p_value;
      row.tiny_p = r.p_value < 1e-5;
      pvalues.push_back(r.p_value);
      tested.push_back(out.sites.size());
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NearSingularCovariance) throw;
      row.failed = true;
      row.statistic = std::numeric_limits<double>::quiet_NaN();
      row.p_value = std::numeric_limits<double>::quiet_NaN();
    }
    out.sites.push_back(row);
  }

  if (!pvalues.empty()) {
    const MultiTestResult bh = bh_fdr(pvalues, alpha);
    const MultiTestResult bonf = bonferroni(pvalues, alpha);
    for (std::size_t i = 0; i < tested.size(); ++i) {
      out.sites[tested[i]].bh_rejected = bh.rejected[i];
      out.sites[tested[i]].bonferroni_rejected = bonf.rejected[i];
    }
    out.bh_rejections = bh.rejections;
    out.bonferroni_rejections = bonf.rejections;
    out.bonferroni_global_p = bonf.global_p;
  }
  return out;
}

void write_fiber_csv(const FiberAnalysis& analysis, std::ostream& out) {
  out << "site,statistic,df,p_value,tiny_p,bh_rejected,bonferroni_rejected\n";
  for (const SiteTestResult& r : analysis.sites) {
    out << r.site << ',' << format_double(r.statistic) << ',' << r.df << ',' << format_double(r.p_value) << ','
        << (r.tiny_p ? 1 : 0) << ',' << (r.bh_rejected ? 1 : 0) << ',' << (r.bonferroni_rejected ? 1 : 0)
        << '\n';
  }
}

}  // namespace frechet::cli
