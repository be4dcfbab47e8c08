#pragma once

// Hand-rolled generators for property tests. Each property runs over a fixed
// number of cases drawn from a seeded stream, so failures replay exactly.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "rfkl/points.hpp"
#include "rfkl/rng.hpp"

namespace gen {

template <class F>
void for_all(std::size_t cases, std::uint64_t seed, F&& property) {
  rfkl::Rng rng(seed);
  for (std::size_t i = 0; i < cases; ++i) property(rng, i);
}

inline std::vector<double> uniform_vector(rfkl::Rng& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(lo, hi);
  return v;
}

inline std::vector<double> normal_vector(rfkl::Rng& rng, std::size_t n, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

/// Uniform in the box [-bound, bound]^m.
inline std::vector<double> theta_in_box(rfkl::Rng& rng, std::size_t m, double bound) {
  return uniform_vector(rng, m, -bound, bound);
}

/// Uniform in the Euclidean ball of the given radius.
inline std::vector<double> point_in_ball(rfkl::Rng& rng, std::size_t n, double radius) {
  std::vector<double> v = normal_vector(rng, n);
  double s = 0.0;
  for (double x : v) s += x * x;
  const double scale = radius * std::pow(rng.uniform_open(), 1.0 / static_cast<double>(n)) / std::sqrt(s);
  for (double& x : v) x *= scale;
  return v;
}

inline rfkl::PointSet points_in_ball(rfkl::Rng& rng, std::size_t count, std::size_t n, double radius) {
  rfkl::PointSet ps(n);
  for (std::size_t i = 0; i < count; ++i) ps.push_back(point_in_ball(rng, n, radius));
  return ps;
}

inline rfkl::PointSet points_in_box(rfkl::Rng& rng, std::size_t count, std::size_t n, double a) {
  rfkl::PointSet ps(n);
  for (std::size_t i = 0; i < count; ++i) ps.push_back(uniform_vector(rng, n, -a, a));
  return ps;
}

/// Upper 1% point of the chi-square distribution with 15 degrees of freedom.
inline constexpr double kChiSquare15At001 = 30.578;

inline double chi_square(const std::vector<std::size_t>& counts, double expected) {
  double s = 0.0;
  for (std::size_t c : counts) s += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
  return s;
}

}  // namespace gen
