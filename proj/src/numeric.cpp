#include "rfkl/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "rfkl/error.hpp"

namespace rfkl {

namespace {

double pairwise_sum_impl(const double* v, std::size_t n) {
  if (n <= 16) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t half = n / 2;
  return pairwise_sum_impl(v, half) + pairwise_sum_impl(v + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  return pairwise_sum_impl(values.data(), values.size());
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) throw EmptySampleSet("log_sum_exp of an empty set");
  double mx = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(mx)) return mx;
  std::vector<double> shifted(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    shifted[i] = std::exp(values[i] - mx);
  }
  return mx + std::log(pairwise_sum(shifted));
}

double log_mean_exp(std::span<const double> values) {
  return log_sum_exp(values) - std::log(static_cast<double>(values.size()));
}

double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw InvalidArgument("normal_quantile needs u in (0,1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

QuadratureRule gauss_legendre(std::size_t points, double lo, double hi) {
  if (points == 0) throw InvalidArgument("Gauss-Legendre rule needs at least one point");
  QuadratureRule rule;
  rule.nodes.resize(points);
  rule.weights.resize(points);
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  const std::size_t n = points;
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

QuadratureRule composite_gauss_legendre(std::size_t panels, std::size_t points,
                                        double lo, double hi) {
  QuadratureRule out;
  const double width = (hi - lo) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    double a = lo + width * static_cast<double>(p);
    QuadratureRule r = gauss_legendre(points, a, a + width);
    out.nodes.insert(out.nodes.end(), r.nodes.begin(), r.nodes.end());
    out.weights.insert(out.weights.end(), r.weights.begin(), r.weights.end());
  }
  return out;
}

IntegrationResult integrate(const std::function<double(double)>& f, double lo,
                            double hi, const IntegrationOptions& opts) {
  IntegrationResult res;
  if (lo == hi) return res;
  double l1 = 0.0;
  res.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, lo, hi, opts.max_depth, opts.rel_tol, &res.error, &l1);
  if (!std::isfinite(res.value) ||
      res.error > std::max(opts.abs_tol, opts.rel_tol * std::abs(res.value))) {
    throw QuadratureFailure("adaptive quadrature did not converge on [" +
                            std::to_string(lo) + ", " + std::to_string(hi) +
                            "], error estimate " + std::to_string(res.error));
  }
  return res;
}

IntegrationResult integrate(const std::function<double(double)>& f, double lo,
                            double hi, std::span<const double> breakpoints,
                            const IntegrationOptions& opts) {
  std::vector<double> cuts;
  cuts.push_back(lo);
  for (double b : breakpoints) {
    if (b > lo && b < hi) cuts.push_back(b);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  IntegrationResult total;
  IntegrationOptions piece = opts;
  piece.abs_tol = opts.abs_tol / static_cast<double>(cuts.size() - 1);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    IntegrationResult r = integrate(f, cuts[i], cuts[i + 1], piece);
    total.value += r.value;
    total.error += r.error;
  }
  return total;
}

}  // namespace rfkl
