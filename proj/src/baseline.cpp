#include "rfkl/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rfkl/error.hpp"
#include "rfkl/numeric.hpp"

namespace rfkl {

namespace {

constexpr double kDistanceFloor = 1e-300;

// k-th smallest distance from `x` to the rows of `set`, skipping row `skip`.
double kth_distance(std::span<const double> x, const PointSet& set, std::size_t k,
                    std::size_t skip, std::vector<double>& best) {
  best.assign(k, std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < set.size(); ++j) {
    if (j == skip) continue;
    const auto y = set[j];
    double d2 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - y[i];
      d2 += d * d;
    }
    if (d2 < best.back()) {
      auto pos = std::upper_bound(best.begin(), best.end(), d2);
      std::move_backward(pos, best.end() - 1, best.end());
      *pos = d2;
    }
  }
  return std::sqrt(best.back());
}

}  // namespace

KnnResult knn_kl(const KnnConfig& config) {
  const std::size_t k = config.k;
  const PointSet& p = config.samples_p;
  const PointSet& q = config.samples_q;
  if (k == 0) throw InvalidArgument("k must be at least 1");
  if (p.size() <= k || q.size() <= k) {
    throw InsufficientSamples("k-NN estimate needs more than k samples in each set");
  }
  if (p.dim() != q.dim()) throw DimensionMismatch("P and Q sample dimensions differ");

  const std::size_t n_p = p.size();
  const double dim = static_cast<double>(p.dim());
  KnnResult res;
  std::vector<double> logs(n_p), scratch;
  for (std::size_t i = 0; i < n_p; ++i) {
    double rho = kth_distance(p[i], p, k, i, scratch);
    double nu = kth_distance(p[i], q, k, q.size(), scratch);
    if (rho < kDistanceFloor) {
      rho = kDistanceFloor;
      ++res.zero_distances;
    }
    if (nu < kDistanceFloor) {
      nu = kDistanceFloor;
      ++res.zero_distances;
    }
    logs[i] = std::log(nu / rho);
  }
  res.estimate = dim * pairwise_sum(logs) / static_cast<double>(n_p) +
                 std::log(static_cast<double>(q.size()) / static_cast<double>(n_p - 1));
  return res;
}

}  // namespace rfkl
