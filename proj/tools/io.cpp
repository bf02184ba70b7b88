#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include "cli_internal.hpp"
#include "frechet/spaces/euclidean.hpp"
#include "frechet/spaces/openbook.hpp"
#include "frechet/spaces/spd.hpp"
#include "frechet/spaces/sphere.hpp"

namespace frechet::cli {

InputError::InputError(std::size_t line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(std::string_view field, std::size_t line) {
  const std::string_view f = trim(field);
  double value = 0.0;
  const char* begin = f.data();
  const char* end = f.data() + f.size();
  if (!f.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (f.empty() || ec != std::errc() || ptr != end || !std::isfinite(value))
    throw InputError(line, "cannot parse '" + std::string(f) + "' as a finite number");
  return value;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

SpdMetric parse_spd_metric(const std::string& name) {
  if (name == "euclidean") return SpdMetric::euclidean;
  if (name == "log-euclidean" || name == "log_euclidean") return SpdMetric::log_euclidean;
  throw InputError(0, "unknown spd metric '" + name + "' (euclidean | log-euclidean)");
}

namespace {

SphereMetric parse_sphere_metric(const std::string& name) {
  if (name == "intrinsic") return SphereMetric::intrinsic;
  if (name == "extrinsic") return SphereMetric::extrinsic;
  throw InputError(0, "unknown sphere metric '" + name + "' (intrinsic | extrinsic)");
}

bool header_is(const std::vector<std::string>& header, const std::vector<std::string>& expected) {
  return header == expected;
}

std::vector<std::string> numbered(const std::string& prefix, int first, int count) {
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) out.push_back(prefix + std::to_string(first + i));
  return out;
}

int triangle_size(std::size_t fields) {
  for (int p = 1; p <= 10; ++p)
    if (static_cast<std::size_t>(p * (p + 1) / 2) == fields) return p;
  return 0;
}

std::vector<std::string> upper_names(int p) {
  std::vector<std::string> out;
  for (int i = 1; i <= p; ++i)
    for (int j = i; j <= p; ++j) out.push_back("a" + std::to_string(i) + std::to_string(j));
  return out;
}

}  // namespace

ParsedPoints read_points(std::istream& in, const SpaceFlags& flags) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw InputError(1, "empty input; a header line is required");
  const std::vector<std::string> header = split_csv(line);

  ParsedPoints out;
  const std::string& kind = flags.space;
  std::size_t columns = header.size();
  int spd_size = 0;
  if (kind == "euclidean" || kind == "sphere") {
    if (!header_is(header, numbered("x", 1, static_cast<int>(columns))))
      throw InputError(1, "header must be x1,...,xN");
    if (kind == "euclidean") {
      if (!flags.metric.empty() && flags.metric != "euclidean")
        throw InputError(0, "euclidean space has only the euclidean metric");
      out.space = std::make_unique<EuclideanSpace>(static_cast<int>(columns));
    } else {
      if (columns < 2) throw InputError(1, "sphere points need at least two coordinates");
      out.space = std::make_unique<SphereSpace>(static_cast<int>(columns) - 1,
                                                parse_sphere_metric(flags.metric.empty() ? "intrinsic" : flags.metric));
    }
  } else if (kind == "spd") {
    spd_size = triangle_size(columns);
    if (spd_size == 0 || !header_is(header, upper_names(spd_size)))
      throw InputError(1, "header must list the upper triangle row by row, e.g. a11,a12,a13,a22,a23,a33");
    out.space = std::make_unique<SpdSpace>(spd_size, parse_spd_metric(flags.metric.empty() ? "log-euclidean" : flags.metric));
  } else if (kind == "openbook") {
    if (columns < 2 || header[0] != "leaf" ||
        !header_is(std::vector<std::string>(header.begin() + 1, header.end()),
                   numbered("x", 0, static_cast<int>(columns) - 1)))
      throw InputError(1, "header must be leaf,x0,...,xD");
  } else {
    throw InputError(0, "unknown space '" + kind + "' (euclidean | sphere | spd | openbook)");
  }

  int max_leaf = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != columns)
      throw InputError(line_no, "expected " + std::to_string(columns) + " fields, found " +
                                    std::to_string(fields.size()));
    Vector values(static_cast<Eigen::Index>(columns));
    for (std::size_t i = 0; i < columns; ++i) values[static_cast<Eigen::Index>(i)] = parse_number(fields[i], line_no);
    try {
      if (kind == "euclidean") {
        out.points.push_back(make_euclidean(values));
      } else if (kind == "sphere") {
        const double norm = values.norm();
        if (std::abs(norm - 1.0) > 1e-6)
          throw InputError(line_no, "sphere point has norm " + format_double(norm) + "; expected 1 within 1e-6");
        out.points.push_back(make_sphere(values / norm));
      } else if (kind == "spd") {
        Matrix a(spd_size, spd_size);
        Eigen::Index k = 0;
        for (int i = 0; i < spd_size; ++i)
          for (int j = i; j < spd_size; ++j) a(i, j) = a(j, i) = values[k++];
        out.points.push_back(make_spd(a));
      } else {
        const double leaf = values[0];
        if (leaf < 0.0 || leaf != std::floor(leaf) || leaf > 1e6)
          throw InputError(line_no, "leaf must be a nonnegative integer");
        if (flags.leaves > 0 && leaf > flags.leaves)
          throw InputError(line_no, "leaf exceeds --leaves " + std::to_string(flags.leaves));
        max_leaf = std::max(max_leaf, static_cast<int>(leaf));
        out.points.push_back(make_openbook(static_cast<int>(leaf), values.tail(values.size() - 1)));
      }
    } catch (const Error& e) {
      throw InputError(line_no, e.what());
    }
  }
  if (out.points.empty()) throw InputError(line_no, "no data rows after the header");
  if (kind == "openbook")
    out.space = std::make_unique<OpenBookSpace>(flags.leaves > 0 ? flags.leaves : std::max(2, max_leaf),
                                                static_cast<int>(columns) - 2);
  return out;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

Json point_to_json(const Point& p) {
  return std::visit(
      [](const auto& x) -> Json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, EuclideanPoint>) return vector_to_json(x.coords);
        if constexpr (std::is_same_v<T, SpherePoint>) return vector_to_json(x.unit);
        if constexpr (std::is_same_v<T, SpdPoint>) return matrix_to_json(x.matrix);
        if constexpr (std::is_same_v<T, OpenBookPoint>) {
          Json j;
          j["leaf"] = x.leaf;
          j["coords"] = vector_to_json(x.coords);
          return j;
        }
      },
      p);
}

namespace {

Vector json_vector(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw InputError(0, std::string(what) + " must be a nonempty array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InputError(0, std::string(what) + " must hold numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Vector json_vector_or_empty(const Json& j, const char* what) {
  if (j.is_array() && j.empty()) return Vector(0);
  return json_vector(j, what);
}

Matrix json_matrix(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw InputError(0, std::string(what) + " must be a nonempty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const Vector row = json_vector(j[r], what);
    if (static_cast<std::size_t>(row.size()) != cols) throw InputError(0, std::string(what) + " rows differ in length");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw InputError(0, std::string("descriptor is missing '") + key + "'");
  return j.at(key);
}

std::string require_string(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_string()) throw InputError(0, std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

double require_number(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_number()) throw InputError(0, std::string("'") + key + "' must be a number");
  return v.get<double>();
}

std::size_t count_field(const Json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number_unsigned() || v.get<std::size_t>() < 1)
    throw InputError(0, std::string("'") + key + "' must be a positive integer");
  return v.get<std::size_t>();
}

int positive_int(const Json& j, const char* key) {
  const Json& v = require(j, key);
  if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<long long>() > 1000)
    throw InputError(0, std::string("'") + key + "' must be a small nonnegative integer");
  return static_cast<int>(v.get<long long>());
}

std::unique_ptr<Space> space_from_json(const Json& j) {
  const std::string type = require_string(j, "type");
  try {
    if (type == "euclidean") return std::make_unique<EuclideanSpace>(positive_int(j, "dim"));
    if (type == "sphere")
      return std::make_unique<SphereSpace>(positive_int(j, "dim"),
                                           parse_sphere_metric(j.value("metric", std::string("intrinsic"))));
    if (type == "spd")
      return std::make_unique<SpdSpace>(positive_int(j, "p"),
                                        parse_spd_metric(j.value("metric", std::string("log-euclidean"))));
    if (type == "openbook")
      return std::make_unique<OpenBookSpace>(positive_int(j, "leaves"), positive_int(j, "spine_dim"));
  } catch (const Error& e) {
    throw InputError(0, e.what());
  }
  throw InputError(0, "unknown space type '" + type + "'");
}

ZerothFamily parse_family(const std::string& name) {
  if (name == "exponential") return ZerothFamily::exponential;
  if (name == "half_gaussian" || name == "half-gaussian") return ZerothFamily::half_gaussian;
  if (name == "constant") return ZerothFamily::constant;
  throw InputError(0, "unknown x0 family '" + name + "' (exponential | half_gaussian | constant)");
}

Point point_from_json(const Json& j, const Space& space) {
  switch (space.kind()) {
    case PointKind::euclidean: return EuclideanPoint{json_vector(j, "point")};
    case PointKind::sphere: return SpherePoint{json_vector(j, "point")};
    case PointKind::spd: return SpdPoint{json_matrix(j, "point")};
    case PointKind::openbook:
      return make_openbook(positive_int(j, "leaf"), json_vector(require(j, "coords"), "coords"));
  }
  throw InputError(0, "unsupported point");
}

Distribution distribution_from_json(const Json& j, const Space& space) {
  const std::string type = require_string(j, "type");
  if (type == "gaussian") return GaussianDistribution{json_vector(require(j, "mean"), "mean"), json_matrix(require(j, "cov"), "cov")};
  if (type == "cap")
    return SphereCapDistribution{json_vector(require(j, "center"), "center"), require_number(j, "radius")};
  if (type == "two_point")
    return SphereTwoPointDistribution{json_vector(require(j, "center"), "center"),
                                      json_vector(require(j, "direction"), "direction"), require_number(j, "angle")};
  if (type == "spd_lognormal")
    return SpdLogNormalDistribution{json_matrix(require(j, "mean_log"), "mean_log"), require_number(j, "scale")};
  if (type == "openbook") {
    OpenBookDistribution o;
    const Json& probs = require(j, "leaf_probs");
    const Vector p = json_vector(probs, "leaf_probs");
    o.leaf_probs.assign(p.data(), p.data() + p.size());
    const Json& leaves = require(j, "leaves");
    if (!leaves.is_array()) throw InputError(0, "'leaves' must be an array");
    for (const Json& l : leaves) {
      LeafDistribution leaf;
      leaf.family = parse_family(require_string(l, "family"));
      leaf.parameter = require_number(l, "parameter");
      const auto* book = dynamic_cast<const OpenBookSpace*>(&space);
      leaf.rest_mean = l.contains("rest_mean") ? json_vector_or_empty(l.at("rest_mean"), "rest_mean")
                                               : Vector::Zero(book != nullptr ? book->spine_dim() : 0);
      leaf.rest_sd = l.value("rest_sd", 1.0);
      o.leaves.push_back(leaf);
    }
    return o;
  }
  if (type == "point_mass") return PointMassDistribution{point_from_json(require(j, "point"), space)};
  throw InputError(0, "unknown sampler type '" + type + "'");
}

}  // namespace

Descriptor parse_descriptor(const Json& j, std::uint64_t seed) {
  if (!j.is_object()) throw InputError(0, "descriptor must be a JSON object");
  Descriptor d;
  d.space = space_from_json(require(j, "space"));
  d.sampler.distribution = distribution_from_json(require(j, "sampler"), *d.space);
  d.sampler.seed = seed;
  validate_sampler(d.sampler);
  d.n = count_field(j, "n", d.n);
  d.reps = count_field(j, "reps", d.reps);
  d.n1 = count_field(j, "n1", d.n1);
  d.n2 = count_field(j, "n2", d.n2);
  if (j.contains("alpha")) d.alpha = require_number(j, "alpha");
  if (!(d.alpha > 0.0 && d.alpha < 1.0)) throw InputError(0, "alpha must lie in (0, 1)");
  if (j.contains("shared_stream")) {
    if (!j.at("shared_stream").is_boolean()) throw InputError(0, "'shared_stream' must be a boolean");
    d.shared_stream = j.at("shared_stream").get<bool>();
  }
  if (j.contains("n_grid")) {
    d.n_grid.clear();
    const Json& grid = j.at("n_grid");
    if (!grid.is_array() || grid.empty()) throw InputError(0, "'n_grid' must be a nonempty array");
    for (const Json& g : grid) {
      if (!g.is_number_unsigned() || g.get<std::size_t>() < 1) throw InputError(0, "'n_grid' entries must be positive integers");
      d.n_grid.push_back(g.get<std::size_t>());
    }
  }
  if (j.contains("derivatives")) {
    const std::string mode = require_string(j, "derivatives");
    if (mode == "numeric") d.options.estimate.derivatives = DerivativeMode::numeric;
    else if (mode != "automatic") throw InputError(0, "'derivatives' must be automatic or numeric");
  }
  return d;
}

}  // namespace frechet::cli
