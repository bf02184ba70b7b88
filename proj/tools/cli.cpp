#include <algorithm>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "cli_internal.hpp"
#include "frechet/estimator.hpp"
#include "frechet/inference.hpp"
#include "frechet/spaces/openbook.hpp"

namespace frechet::cli {
namespace {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NoConvergence:
    case ErrorKind::CutLocus:
    case ErrorKind::NonUniqueProjection:
      return kExitNoConvergence;
    case ErrorKind::NearSingularHessian:
    case ErrorKind::NearSingularCovariance:
      return kExitPartialFailure;
    default:
      return kExitInputError;
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(0, "cannot open '" + path + "'");
  return in;
}

// Writes `text` to `path`, or to `out` when no path was given.
void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file || !(file << text)) throw InputError(0, "cannot write '" + path + "'");
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

EstimateOptions estimate_options(const std::string& derivatives, int max_iterations, double tolerance) {
  EstimateOptions o;
  if (derivatives == "numeric") o.derivatives = DerivativeMode::numeric;
  else if (derivatives != "automatic") throw InputError(0, "--derivatives must be automatic or numeric");
  if (max_iterations < 1) throw InputError(0, "--max-iterations must be positive");
  if (!(tolerance > 0.0)) throw InputError(0, "--tolerance must be positive");
  o.max_iterations = max_iterations;
  o.tolerance = tolerance;
  return o;
}

struct MeanArgs {
  std::string file;
  SpaceFlags flags;
  std::string derivatives = "automatic";
  int max_iterations = 200;
  double tolerance = 1e-10;
  std::string output;
};

int run_mean(const MeanArgs& a, std::ostream& out, std::ostream& err) {
  std::ifstream in = open_input(a.file);
  const ParsedPoints parsed = read_points(in, a.flags);
  const EstimateOptions options = estimate_options(a.derivatives, a.max_iterations, a.tolerance);

  FrechetFit fit;
  try {
    fit = estimate_mean(*parsed.space, parsed.points, options);
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << " (iterations " << e.iterations() << ", gradient norm "
        << format_double(e.grad_norm()) << ")\n";
    return kExitNoConvergence;
  }

  Json j;
  j["space"] = parsed.space->name();
  j["n"] = fit.n;
  j["mean"] = point_to_json(fit.mean);
  j["chart_coords"] = vector_to_json(fit.chart_coords);
  int code = kExitOk;
  try {
    fit = sandwich_covariance(*parsed.space, parsed.points, std::move(fit), options);
    j["mean_covariance"] = matrix_to_json(fit.mean_covariance());
    j["asym_cov"] = matrix_to_json(fit.asym_cov);
    j["lambda_n"] = matrix_to_json(fit.lambda_n);
    j["c_n"] = matrix_to_json(fit.c_n);
  } catch (const Error& e) {
    if (exit_code_for(e.kind()) != kExitPartialFailure) throw;
    err << "warning: " << e.what() << "; covariance omitted\n";
    j["mean_covariance"] = nullptr;
    j["asym_cov"] = nullptr;
    j["lambda_n"] = nullptr;
    j["c_n"] = nullptr;
    code = kExitPartialFailure;
  }
  j["diagnostics"] = {{"strategy", std::string(to_string(fit.strategy))},
                      {"iterations", fit.iterations},
                      {"grad_norm", fit.grad_norm},
                      {"lambda_positive_definite", fit.has_covariance ? Json(fit.lambda_positive_definite) : Json()},
                      {"lambda_condition", fit.has_covariance ? Json(fit.lambda_condition) : Json()}};
  emit(dump(j), a.output, out);
  return code;
}

struct Test2Args {
  std::string file_x;
  std::string file_y;
  SpaceFlags flags;
  std::string output;
};

int run_test2(const Test2Args& a, std::ostream& out, std::ostream& err) {
  std::ifstream in_x = open_input(a.file_x);
  std::ifstream in_y = open_input(a.file_y);
  ParsedPoints x = read_points(in_x, a.flags);
  const ParsedPoints y = read_points(in_y, a.flags);
  if (a.flags.space == "openbook" && a.flags.leaves == 0) {
    // Without --leaves the book must hold every leaf seen in either file.
    const auto* bx = dynamic_cast<const OpenBookSpace*>(x.space.get());
    const auto* by = dynamic_cast<const OpenBookSpace*>(y.space.get());
    x.space = std::make_unique<OpenBookSpace>(std::max(bx->leaves(), by->leaves()), bx->spine_dim());
  }

  Json j;
  j["space"] = x.space->name();
  int code = kExitOk;
  try {
    const TwoSampleResult r = two_sample_test(*x.space, x.points, y.points);
    j["statistic"] = r.statistic;
    j["df"] = r.dof;
    j["p_value"] = r.p_value;
    j["n1"] = r.n1;
    j["n2"] = r.n2;
    j["tiny_p"] = r.p_value < 1e-5;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NearSingularCovariance) throw;
    err << "warning: " << e.what() << "\n";
    j["statistic"] = nullptr;
    j["df"] = x.space->chart_dim();
    j["p_value"] = nullptr;
    j["n1"] = x.points.size();
    j["n2"] = y.points.size();
    j["tiny_p"] = false;
    code = kExitPartialFailure;
  }
  emit(dump(j), a.output, out);
  return code;
}

struct FiberArgs {
  std::string dataset;
  std::string metric = "log-euclidean";
  double alpha = 0.05;
  std::string output;
};

int run_fiber(const FiberArgs& a, std::ostream& out, std::ostream& err) {
  const SpdMetric metric = parse_spd_metric(a.metric);
  std::ifstream in = open_input(a.dataset);
  const FiberDataset data = parse_fiber_dataset(in);
  const FiberAnalysis analysis = analyze_fiber(data, metric, a.alpha);

  std::ostringstream csv;
  write_fiber_csv(analysis, csv);

  Json summary;
  summary["metric"] = metric == SpdMetric::log_euclidean ? "log-euclidean" : "euclidean";
  summary["alpha"] = a.alpha;
  summary["subjects"] = data.subjects.size();
  summary["sites"] = data.sites;
  Json failed = Json::array();
  Json bh_sites = Json::array();
  Json tiny = Json::array();
  for (const SiteTestResult& r : analysis.sites) {
    if (r.failed) failed.push_back(r.site);
    if (r.bh_rejected) bh_sites.push_back(r.site);
    if (r.tiny_p) tiny.push_back(r.site);
  }
  summary["tested_sites"] = analysis.sites.size() - failed.size();
  summary["failed_sites"] = failed;
  summary["bonferroni_global_p"] = analysis.bonferroni_global_p;
  summary["bonferroni_rejections"] = analysis.bonferroni_rejections;
  summary["bh_rejections"] = analysis.bh_rejections;
  summary["bh_rejected_sites"] = bh_sites;
  summary["tiny_p_sites"] = tiny;

  if (a.output.empty()) {
    out << csv.str();
    err << dump(summary);
  } else {
    emit(csv.str(), a.output, out);
    out << dump(summary);
  }
  if (!failed.empty()) {
    err << "warning: " << failed.size() << " site(s) had a near-singular covariance and were not tested\n";
    return kExitPartialFailure;
  }
  return kExitOk;
}

struct SimulateArgs {
  std::string experiment;
  std::string descriptor;
  std::uint64_t seed = 1;
  double alpha = -1.0;
  std::size_t reps = 0;
  std::string output;
};

Json report_json(const MCReport& r) {
  Json j;
  j["reps"] = r.reps;
  j["failures"] = r.failures;
  j["successes"] = r.successes;
  j["estimate"] = r.estimate;
  j["std_error"] = r.std_error;
  if (!r.fractions.empty()) {
    Json f;
    for (const auto& [k, v] : r.fractions) f[k] = v;
    j["fractions"] = f;
  }
  if (r.dof > 0) j["df"] = r.dof;
  return j;
}

int run_simulate(const SimulateArgs& a, std::ostream& out, std::ostream&) {
  std::ifstream in = open_input(a.descriptor);
  Json raw;
  try {
    raw = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError(0, std::string("descriptor is not valid JSON: ") + e.what());
  }
  Descriptor d = parse_descriptor(raw, a.seed);
  if (a.alpha >= 0.0) {
    if (!(a.alpha > 0.0 && a.alpha < 1.0)) throw InputError(0, "--alpha must lie in (0, 1)");
    d.alpha = a.alpha;
  }
  if (a.reps > 0) d.reps = a.reps;

  Json j;
  j["experiment"] = a.experiment;
  j["seed"] = a.seed;
  j["space"] = d.space->name();
  if (a.experiment == "coverage") {
    j["n"] = d.n;
    j["alpha"] = d.alpha;
    j.update(report_json(mc_coverage(*d.space, d.sampler, d.n, d.reps, d.alpha, d.options)));
  } else if (a.experiment == "stickiness") {
    const auto* book = dynamic_cast<const OpenBookSpace*>(d.space.get());
    if (book == nullptr) throw InputError(0, "stickiness needs an openbook space");
    j["n"] = d.n;
    j.update(report_json(mc_stickiness(*book, d.sampler, d.n, d.reps)));
  } else if (a.experiment == "type1") {
    j["n1"] = d.n1;
    j["n2"] = d.n2;
    j["alpha"] = d.alpha;
    j["shared_stream"] = d.shared_stream;
    j.update(report_json(mc_type1(*d.space, d.sampler, d.n1, d.n2, d.reps, d.alpha, d.shared_stream, d.options)));
  } else if (a.experiment == "consistency") {
    j["reps"] = d.reps;
    Json rows = Json::array();
    for (const ConsistencyRow& row : mc_consistency(*d.space, d.sampler, d.n_grid, d.reps, d.options))
      rows.push_back({{"n", row.n}, {"median_error", row.median_error}, {"failures", row.failures}});
    j["rows"] = rows;
  } else {
    throw InputError(0, "unknown experiment '" + a.experiment + "' (coverage | stickiness | type1 | consistency)");
  }
  emit(dump(j), a.output, out);
  return kExitOk;
}

int run_gen_fiber(const FiberConfig& config, const std::string& output, std::ostream& out) {
  emit(generate_fiber_csv(config), output, out);
  return kExitOk;
}

void add_space_flags(CLI::App* cmd, SpaceFlags& flags) {
  cmd->add_option("--space", flags.space, "euclidean | sphere | spd | openbook")->capture_default_str();
  cmd->add_option("--metric", flags.metric,
                  "sphere: intrinsic | extrinsic (default intrinsic); spd: euclidean | log-euclidean (default log-euclidean)");
  cmd->add_option("--leaves", flags.leaves, "number of open-book leaves (default: largest leaf index seen)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Frechet means, sandwich confidence regions and two-sample tests on metric spaces", "frechet"};
  app.require_subcommand(1);

  MeanArgs mean;
  CLI::App* mean_cmd = app.add_subcommand("mean", "sample Frechet mean with its sandwich covariance");
  mean_cmd->add_option("file", mean.file, "CSV of points with a header line")->required();
  add_space_flags(mean_cmd, mean.flags);
  mean_cmd->add_option("--derivatives", mean.derivatives, "automatic | numeric")->capture_default_str();
  mean_cmd->add_option("--max-iterations", mean.max_iterations)->capture_default_str();
  mean_cmd->add_option("--tolerance", mean.tolerance)->capture_default_str();
  mean_cmd->add_option("--output", mean.output, "write JSON here instead of stdout");

  Test2Args test2;
  CLI::App* test2_cmd = app.add_subcommand("test2", "two-sample test for equal Frechet means");
  test2_cmd->add_option("file_x", test2.file_x)->required();
  test2_cmd->add_option("file_y", test2.file_y)->required();
  add_space_flags(test2_cmd, test2.flags);
  test2_cmd->add_option("--output", test2.output);

  FiberArgs fiber;
  CLI::App* fiber_cmd = app.add_subcommand("fiber", "site-wise two-group tests along a fiber tract");
  fiber_cmd->add_option("dataset", fiber.dataset)->required();
  fiber_cmd->add_option("--metric", fiber.metric, "euclidean | log-euclidean")->capture_default_str();
  fiber_cmd->add_option("--alpha", fiber.alpha)->capture_default_str();
  fiber_cmd->add_option("--output", fiber.output, "write the per-site CSV here; the summary then goes to stdout");

  SimulateArgs sim;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo experiments from a JSON descriptor");
  sim_cmd->add_option("experiment", sim.experiment, "coverage | stickiness | type1 | consistency")->required();
  sim_cmd->add_option("descriptor", sim.descriptor)->required();
  sim_cmd->add_option("--seed", sim.seed)->capture_default_str();
  sim_cmd->add_option("--alpha", sim.alpha, "overrides the descriptor");
  sim_cmd->add_option("--reps", sim.reps, "overrides the descriptor");
  sim_cmd->add_option("--output", sim.output);

  FiberConfig gen;
  std::string gen_output;
  CLI::App* gen_cmd = app.add_subcommand("gen-fiber", "write a synthetic fiber-tract dataset");
  gen_cmd->add_option("--group0", gen.group0)->capture_default_str();
  gen_cmd->add_option("--group1", gen.group1)->capture_default_str();
  gen_cmd->add_option("--sites", gen.sites)->capture_default_str();
  gen_cmd->add_option("--effect-first", gen.effect_first)->capture_default_str();
  gen_cmd->add_option("--effect-last", gen.effect_last)->capture_default_str();
  gen_cmd->add_option("--effect-size", gen.effect_size, "group shift in noise standard deviations")
      ->capture_default_str();
  gen_cmd->add_option("--noise", gen.noise_sd, "log-tensor noise sd")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
  gen_cmd->add_option("--output", gen_output);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (mean_cmd->parsed()) return run_mean(mean, out, err);
    if (test2_cmd->parsed()) return run_test2(test2, out, err);
    if (fiber_cmd->parsed()) return run_fiber(fiber, out, err);
    if (sim_cmd->parsed()) return run_simulate(sim, out, err);
    return run_gen_fiber(gen, gen_output, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
}

}  // namespace frechet::cli
