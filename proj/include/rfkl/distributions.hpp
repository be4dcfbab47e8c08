#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>

#include "rfkl/optimizer.hpp"
#include "rfkl/points.hpp"
#include "rfkl/rng.hpp"

namespace rfkl {

/// A distribution with a density on the box [-a, a]^n.
class BoxDistribution {
 public:
  virtual ~BoxDistribution() = default;

  virtual std::size_t dim() const = 0;
  virtual double half_width() const = 0;
  virtual std::string name() const = 0;

  virtual void sample(Rng& rng, std::span<double> out) const = 0;
  virtual double log_density(std::span<const double> x) const = 0;

  /// True when the density is a product of identical 1D marginals.
  virtual bool is_product() const { return false; }
  /// The 1D marginal log-density; only meaningful when is_product().
  virtual double marginal_log_density(double /*t*/) const { return 0.0; }

  PointSet sample_n(Rng& rng, std::size_t count) const;
  /// Radius of the smallest ball containing the box: a sqrt(n).
  double circumradius() const;
};

/// Density proportional to exp(-|x|^2 / 2) on [-a, a]^n; coordinates are
/// sampled independently by inverting the truncated normal CDF.
class TruncatedGaussianBox final : public BoxDistribution {
 public:
  TruncatedGaussianBox(std::size_t dim, double half_width);

  std::size_t dim() const override { return dim_; }
  double half_width() const override { return a_; }
  std::string name() const override { return "trunc_gauss"; }
  void sample(Rng& rng, std::span<double> out) const override;
  double log_density(std::span<const double> x) const override;
  bool is_product() const override { return true; }
  double marginal_log_density(double t) const override;

  /// Per-coordinate normalization 2 Phi(a) - 1.
  double coordinate_mass() const { return mass_; }

 private:
  std::size_t dim_;
  double a_;
  double mass_;
  double log_norm_;  // log of the 1D normalizer sqrt(2 pi) (2 Phi(a) - 1)
};

class UniformBox final : public BoxDistribution {
 public:
  UniformBox(std::size_t dim, double half_width);

  std::size_t dim() const override { return dim_; }
  double half_width() const override { return a_; }
  std::string name() const override { return "uniform"; }
  void sample(Rng& rng, std::span<double> out) const override;
  double log_density(std::span<const double> x) const override;
  bool is_product() const override { return true; }
  double marginal_log_density(double t) const override;

 private:
  std::size_t dim_;
  double a_;
};

/// Bivariate standard normal with correlation c, truncated to [-a, a]^2.
/// The first coordinate is drawn from its exact marginal by rejection against
/// the truncated normal, the second by inverting its conditional CDF.
class CorrelatedGaussianBox2D final : public BoxDistribution {
 public:
  CorrelatedGaussianBox2D(double half_width, double correlation);

  std::size_t dim() const override { return 2; }
  double half_width() const override { return a_; }
  std::string name() const override { return "corr_gauss"; }
  void sample(Rng& rng, std::span<double> out) const override;
  double log_density(std::span<const double> x) const override;

  double correlation() const { return c_; }
  /// Marginal log-density of either coordinate (the density is symmetric).
  double marginal_log_density_of(double t) const;
  /// The product of the two marginals, as a distribution on the same box.
  std::shared_ptr<const BoxDistribution> product_of_marginals() const;

 private:
  double a_;
  double c_;
  double s_;  // sqrt(1 - c^2)
  double log_norm_;
};

struct DistributionSpec {
  std::string kind = "trunc_gauss";  // trunc_gauss | uniform | corr_gauss
  double a = 2.0;
  double correlation = 0.0;
};

std::shared_ptr<const BoxDistribution> make_distribution(
    const DistributionSpec& spec, std::size_t dim);

struct DistributionPair {
  std::shared_ptr<const BoxDistribution> p;
  std::shared_ptr<const BoxDistribution> q;

  std::size_t dim() const { return p->dim(); }
  /// Radius of a ball containing both supports.
  double enclosing_radius() const;
};

/// Draws x ~ P and y ~ Q from two independent streams.
class IndependentPairSampler final : public PairSampler {
 public:
  IndependentPairSampler(const DistributionPair& pair, std::uint64_t p_seed,
                         std::uint64_t q_seed);
  void draw(std::span<double> x, std::span<double> y) override;

 private:
  DistributionPair pair_;
  Rng p_rng_;
  Rng q_rng_;
};

enum class KlMethod { product_1d, tensor_gauss_legendre, monte_carlo };

struct KlResult {
  double value = 0.0;
  /// Nonzero only for the Monte-Carlo fallback.
  double std_error = 0.0;
  KlMethod method = KlMethod::product_1d;
  /// Gauss-Legendre nodes per axis (tensor path).
  std::size_t nodes = 0;
};

/// D_KL(P || Q). Product pairs use n times a 1D adaptive quadrature
/// (absolute tolerance 1e-10); other pairs with n <= 3 use tensor
/// Gauss-Legendre, doubling the node count until successive values differ by
/// less than 1e-8. Larger non-product pairs need `mc_samples` > 0 and fall
/// back to Monte Carlo with a reported standard error.
KlResult exact_kl(const DistributionPair& pair, std::size_t mc_samples = 0,
                  std::uint64_t mc_seed = 0);

/// 1D KL between marginals by adaptive quadrature.
double kl_1d(const BoxDistribution& p, const BoxDistribution& q);

/// Tensor Gauss-Legendre KL with a fixed node count per axis (n <= 3).
double kl_tensor(const DistributionPair& pair, std::size_t nodes_per_axis);

/// Tensor Gauss-Legendre rule for the distribution: nodes on its box with
/// weights proportional to w_i * density(x_i), normalized to sum to one.
DiscreteMeasure tensor_measure(const BoxDistribution& d,
                               std::size_t nodes_per_axis);

/// The mutual information of a correlated box Gaussian (tensor quadrature).
KlResult exact_mi(const CorrelatedGaussianBox2D& d);

}  // namespace rfkl
