#include "rfkl/features.hpp"

#include <algorithm>
#include <cmath>

#include "rfkl/error.hpp"
#include "rfkl/rng.hpp"

namespace rfkl {

FeatureMap FeatureMap::sample(std::size_t dim, std::size_t neurons,
                              double radius, std::uint64_t seed) {
  if (dim == 0) throw InvalidArgument("feature map dimension must be positive");
  if (neurons == 0) throw InvalidArgument("feature map needs at least one neuron");
  if (!(radius > 0.0)) throw InvalidArgument("feature map radius must be positive");

  Rng rng(seed);
  std::vector<double> weights(dim * neurons);
  std::vector<double> biases(neurons);
  for (std::size_t i = 0; i < neurons; ++i) {
    double* w = weights.data() + i * dim;
    double norm2 = 0.0;
    while (norm2 == 0.0) {
      norm2 = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        w[j] = rng.normal();
        norm2 += w[j] * w[j];
      }
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t j = 0; j < dim; ++j) w[j] *= inv;
    biases[i] = rng.uniform(-radius, radius);
  }
  return FeatureMap(dim, std::move(weights), std::move(biases), radius);
}

FeatureMap::FeatureMap(std::size_t dim, std::vector<double> weights,
                       std::vector<double> biases, double radius)
    : dim_(dim), radius_(radius), weights_(std::move(weights)),
      biases_(std::move(biases)) {
  if (dim_ == 0 || biases_.empty()) throw InvalidArgument("empty feature map");
  if (!(radius_ > 0.0)) throw InvalidArgument("feature map radius must be positive");
  if (weights_.size() != dim_ * biases_.size()) {
    throw DimensionMismatch("weight matrix does not match neurons x dim");
  }
  for (std::size_t i = 0; i < biases_.size(); ++i) {
    double norm2 = 0.0;
    for (double v : weight(i)) norm2 += v * v;
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12) {
      throw InvalidArgument("feature weight " + std::to_string(i) + " is not a unit vector");
    }
    if (!(std::abs(biases_[i]) <= radius_)) {
      throw InvalidArgument("feature bias " + std::to_string(i) + " outside [-R, R]");
    }
  }
}

void FeatureMap::phi(std::span<const double> x, std::span<double> out) const {
  if (x.size() != dim_) throw DimensionMismatch("phi: point has wrong dimension");
  if (out.size() != biases_.size()) throw DimensionMismatch("phi: output has wrong length");
  const std::size_t m = biases_.size();
  const double* w = weights_.data();
  for (std::size_t i = 0; i < m; ++i) {
    double s = biases_[i];
    for (std::size_t j = 0; j < dim_; ++j) s += w[i * dim_ + j] * x[j];
    out[i] = s > 0.0 ? s : 0.0;
  }
}

std::vector<double> FeatureMap::phi(std::span<const double> x) const {
  std::vector<double> out(biases_.size());
  phi(x, out);
  return out;
}

double FeatureMap::psi(std::span<const double> x,
                       std::span<const double> theta) const {
  if (theta.size() != biases_.size()) throw DimensionMismatch("psi: theta has wrong length");
  if (x.size() != dim_) throw DimensionMismatch("psi: point has wrong dimension");
  double acc = 0.0;
  const double* w = weights_.data();
  for (std::size_t i = 0; i < biases_.size(); ++i) {
    double s = biases_[i];
    for (std::size_t j = 0; j < dim_; ++j) s += w[i * dim_ + j] * x[j];
    if (s > 0.0) acc += s * theta[i];
  }
  return acc;
}

}  // namespace rfkl
