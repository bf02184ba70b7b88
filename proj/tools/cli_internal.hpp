#pragma once

#include <istream>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "frechet/cli.hpp"
#include "frechet/simulate.hpp"

namespace frechet::cli {

using Json = nlohmann::ordered_json;

std::string_view trim(std::string_view s);
std::vector<std::string> split_csv(std::string_view line);
/// Strict decimal parse of one field; throws InputError naming `line`.
double parse_number(std::string_view field, std::size_t line);
/// 17 significant digits, "nan" / "inf" / "-inf" for non-finite values.
std::string format_double(double x);

struct SpaceFlags {
  std::string space = "euclidean";
  std::string metric;
  int leaves = 0;
};

/// Reads a header line and one point per line. The header fixes the
/// dimension: x1..xN (euclidean, sphere), the upper triangle a11,a12,... (spd)
/// or leaf,x0..xD (open book). Throws InputError.
struct ParsedPoints {
  std::unique_ptr<Space> space;
  std::vector<Point> points;
};
ParsedPoints read_points(std::istream& in, const SpaceFlags& flags);

SpdMetric parse_spd_metric(const std::string& name);

Json point_to_json(const Point& p);
Json matrix_to_json(const Matrix& m);
Json vector_to_json(const Vector& v);

struct Descriptor {
  std::unique_ptr<Space> space;
  Sampler sampler;
  std::size_t n = 100;
  std::size_t reps = 1000;
  double alpha = 0.05;
  std::size_t n1 = 100;
  std::size_t n2 = 100;
  bool shared_stream = false;
  std::vector<std::size_t> n_grid{50, 500, 5000};
  MCOptions options;
};

/// Builds a space, sampler and experiment settings from a JSON descriptor.
/// Throws InputError (line 0) or Error(InvalidDescriptor).
Descriptor parse_descriptor(const Json& j, std::uint64_t seed);

}  // namespace frechet::cli
