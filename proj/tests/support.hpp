#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "frechet/spaces/euclidean.hpp"
#include "frechet/spaces/openbook.hpp"
#include "frechet/spaces/spd.hpp"
#include "frechet/spaces/sphere.hpp"

namespace testing {

using frechet::Matrix;
using frechet::Point;
using frechet::Vector;

class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

  Vector normal_vector(int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
  }
  Matrix symmetric(int p, double scale = 1.0) {
    Matrix a(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) a(i, j) = scale * normal();
    return 0.5 * (a + a.transpose());
  }
  Matrix orthogonal(int p) {
    Matrix a(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) a(i, j) = normal();
    Eigen::HouseholderQR<Matrix> qr(a);
    return qr.householderQ() * Matrix::Identity(p, p);
  }
  Matrix spd(int p) {
    const Matrix q = orthogonal(p);
    Vector ev(p);
    for (int i = 0; i < p; ++i) ev[i] = std::exp(uniform(-2.0, 2.0));
    Matrix a = q * ev.asDiagonal() * q.transpose();
    return 0.5 * (a + a.transpose());
  }

  Point euclidean(int dim) { return frechet::EuclideanPoint{normal_vector(dim)}; }
  Point sphere(int d) {
    Vector v = normal_vector(d + 1);
    return frechet::SpherePoint{v / v.norm()};
  }
  Point spd_point(int p) { return frechet::SpdPoint{spd(p)}; }
  Point openbook(int leaves, int spine_dim, double spine_prob = 0.1) {
    Vector coords(spine_dim + 1);
    for (int i = 1; i <= spine_dim; ++i) coords[i] = 2.0 * normal();
    if (uniform() < spine_prob) {
      coords[0] = 0.0;
      return frechet::OpenBookPoint{0, coords};
    }
    coords[0] = std::abs(2.0 * normal()) + 1e-9;
    return frechet::OpenBookPoint{integer(1, leaves), coords};
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline double frobenius_relative(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

}  // namespace testing
