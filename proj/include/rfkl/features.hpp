#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rfkl {

/// Frozen random ReLU features phi_i(x) = max(0, w_i . x + b_i) with w_i on
/// the unit sphere and b_i in [-R, R]. Immutable once built, so one map may
/// be read from several threads at once.
class FeatureMap {
 public:
  /// Weights i.i.d. uniform on S^{n-1} (normalized Gaussian draws), biases
  /// i.i.d. uniform on [-radius, radius]. Deterministic in the seed.
  static FeatureMap sample(std::size_t dim, std::size_t neurons, double radius,
                           std::uint64_t seed);

  /// Builds a map from explicit parameters; `weights` is row-major
  /// neurons x dim. Rejects non-unit weights and out-of-range biases.
  FeatureMap(std::size_t dim, std::vector<double> weights,
             std::vector<double> biases, double radius);

  std::size_t dim() const { return dim_; }
  std::size_t neurons() const { return biases_.size(); }
  double radius() const { return radius_; }

  std::span<const double> weight(std::size_t i) const {
    return {weights_.data() + i * dim_, dim_};
  }
  double bias(std::size_t i) const { return biases_[i]; }
  std::span<const double> weights() const { return weights_; }
  std::span<const double> biases() const { return biases_; }

  /// Writes phi(x) into `out` (length neurons()).
  void phi(std::span<const double> x, std::span<double> out) const;
  std::vector<double> phi(std::span<const double> x) const;

  /// psi(x, theta) = phi(x) . theta
  double psi(std::span<const double> x, std::span<const double> theta) const;

 private:
  std::size_t dim_;
  double radius_;
  std::vector<double> weights_;
  std::vector<double> biases_;
};

}  // namespace rfkl
