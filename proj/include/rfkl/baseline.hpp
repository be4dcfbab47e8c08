#pragma once

#include <cstddef>

#include "rfkl/points.hpp"

namespace rfkl {

struct KnnConfig {
  std::size_t k = 1;
  PointSet samples_p;
  PointSet samples_q;
};

struct KnnResult {
  double estimate = 0.0;
  /// Distances floored at 1e-300 because two points coincided.
  std::size_t zero_distances = 0;
};

/// k-nearest-neighbour divergence estimate
///   (n/N) sum_i log(nu_k(i) / rho_k(i)) + log(M / (N - 1)),
/// rho_k(i) the k-th neighbour distance of p_i among the other P samples and
/// nu_k(i) the k-th neighbour distance of p_i among the Q samples. Brute
/// force; ties resolve by index order. Requires more than k points per set.
KnnResult knn_kl(const KnnConfig& config);

}  // namespace rfkl
