#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace rfkl {

/// Sum by recursive halving; the reduction order depends only on the length,
/// so results are reproducible and the rounding error grows as O(log n).
double pairwise_sum(std::span<const double> values);

/// log(sum_i exp(v_i)), shifted by the maximum. Requires a nonempty input.
double log_sum_exp(std::span<const double> values);

/// log((1/N) sum_i exp(v_i)).
double log_mean_exp(std::span<const double> values);

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile; u must lie in (0, 1).
double normal_quantile(double u);

/// Gauss-Legendre rule on [lo, hi].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

QuadratureRule gauss_legendre(std::size_t points, double lo, double hi);

/// Composite Gauss-Legendre: `panels` equal panels of `points` nodes each.
QuadratureRule composite_gauss_legendre(std::size_t panels, std::size_t points,
                                        double lo, double hi);

struct IntegrationOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-12;
  unsigned max_depth = 20;
};

struct IntegrationResult {
  double value = 0.0;
  double error = 0.0;
};

/// Adaptive Gauss-Kronrod (G15/K31) on [lo, hi]; either bound may be
/// infinite. Throws QuadratureFailure when the error estimate misses both
/// tolerances or the result is not finite.
IntegrationResult integrate(const std::function<double(double)>& f, double lo,
                            double hi, const IntegrationOptions& opts = {});

/// Same, split at the given interior breakpoints (kinks or jumps of f).
IntegrationResult integrate(const std::function<double(double)>& f, double lo,
                            double hi, std::span<const double> breakpoints,
                            const IntegrationOptions& opts = {});

}  // namespace rfkl
