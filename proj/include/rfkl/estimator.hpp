#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rfkl/features.hpp"
#include "rfkl/optimizer.hpp"
#include "rfkl/points.hpp"

namespace rfkl {

/// Donsker-Varadhan estimate: kl_hat = mean_term - log_mgf_term.
struct DvEstimate {
  double kl_hat = 0.0;
  double mean_term = 0.0;     // (1/N) sum psi(x_i)
  double log_mgf_term = 0.0;  // log (1/M) sum e^{psi(y_j)}
  std::size_t n_eval = 0;
};

/// Evaluates the DV objective of psi(., theta) on samples x ~ P, y ~ Q.
DvEstimate dv_estimate(const FeatureMap& map, std::span<const double> theta,
                       const PointSet& x, const PointSet& y);

/// Empirical f(theta) = -kl_hat.
double negative_objective(const FeatureMap& map, std::span<const double> theta,
                          const PointSet& x, const PointSet& y);

struct MiConfig {
  std::size_t a_dim = 1;
  std::uint64_t T = 100000;
  double alpha = 0.0;  // 0 selects T^{-2/3}
  double r = 0.0;      // 0 selects 1/m
  double box_bound = 0.0;
  double sample_radius = 0.0;
  DomainPolicy policy = DomainPolicy::reject;
  /// Fraction of the pairs held out for evaluation.
  double eval_fraction = 0.5;
  std::uint64_t seed = 0;
};

/// Mutual information I(a; b) as KL(P_AB || P_A x P_B). Rows of `pairs` are
/// (a, b) with the first a_dim coordinates forming a. The leading pairs train
/// the network; product-measure samples pair a_i with b_{pi(i)} for a fresh
/// uniform permutation pi per pass over the data. The held-out tail is
/// evaluated the same way with its own permutation.
DvEstimate mi_estimate(const FeatureMap& map, const PointSet& pairs,
                       const MiConfig& config);

}  // namespace rfkl
