#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace rfkl {

/// Seedable generator with a fixed, documented identity: std::mt19937_64
/// (whose output sequence is pinned by the C++ standard) seeded through one
/// round of splitmix64. Variate transforms are implemented here rather than
/// taken from <random>, because the standard distributions are
/// implementation-defined and would break cross-platform replay.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on the open interval (0, 1).
  double uniform_open();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal by inversion of the CDF.
  double normal();
  /// Uniform integer in [0, n), unbiased (rejection on the top bits).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Derives an independent stream seed from a master seed and a path of
/// indices, e.g. derive_seed(master, {group, trial, stream}).
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> path);

/// Uniformly random permutation of 0..n-1 (Fisher-Yates).
std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng);

}  // namespace rfkl
