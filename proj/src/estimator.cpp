#include "rfkl/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "rfkl/error.hpp"
#include "rfkl/numeric.hpp"
#include "rfkl/rng.hpp"

namespace rfkl {

DvEstimate dv_estimate(const FeatureMap& map, std::span<const double> theta,
                       const PointSet& x, const PointSet& y) {
  if (x.empty() || y.empty()) throw EmptySampleSet("DV estimate needs samples from both P and Q");
  if (x.dim() != map.dim() || y.dim() != map.dim()) throw DimensionMismatch("sample dimension differs from n");
  if (theta.size() != map.neurons()) throw DimensionMismatch("theta length differs from m");

  std::vector<double> psi_x(x.size()), psi_y(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) psi_x[i] = map.psi(x[i], theta);
  for (std::size_t j = 0; j < y.size(); ++j) psi_y[j] = map.psi(y[j], theta);

  DvEstimate est;
  est.mean_term = pairwise_sum(psi_x) / static_cast<double>(x.size());
  est.log_mgf_term = log_mean_exp(psi_y);
  if (!std::isfinite(est.mean_term) || !std::isfinite(est.log_mgf_term)) {
    throw NumericalFailure("DV terms are not finite");
  }
  est.kl_hat = est.mean_term - est.log_mgf_term;
  est.n_eval = x.size();
  return est;
}

double negative_objective(const FeatureMap& map, std::span<const double> theta,
                          const PointSet& x, const PointSet& y) {
  return -dv_estimate(map, theta, x, y).kl_hat;
}

namespace {

// Walks the training pairs in epochs. Each epoch draws one permutation for
// the order of joint samples and one for the b-parts of the product samples.
class ShuffledPairSampler final : public PairSampler {
 public:
  ShuffledPairSampler(const PointSet& pairs, std::size_t count, std::size_t a_dim,
                      std::uint64_t seed)
      : pairs_(pairs), count_(count), a_dim_(a_dim), rng_(seed) {}

  void draw(std::span<double> x, std::span<double> y) override {
    if (pos_ == order_.size()) {
      order_ = random_permutation(count_, rng_);
      partner_ = random_permutation(count_, rng_);
      pos_ = 0;
    }
    const auto joint = pairs_[order_[pos_]];
    const auto other = pairs_[partner_[pos_]];
    ++pos_;
    std::copy(joint.begin(), joint.end(), x.begin());
    std::copy(joint.begin(), joint.begin() + a_dim_, y.begin());
    std::copy(other.begin() + a_dim_, other.end(), y.begin() + a_dim_);
  }

 private:
  const PointSet& pairs_;
  std::size_t count_;
  std::size_t a_dim_;
  Rng rng_;
  std::vector<std::size_t> order_, partner_;
  std::size_t pos_ = 0;
};

}  // namespace

DvEstimate mi_estimate(const FeatureMap& map, const PointSet& pairs,
                       const MiConfig& config) {
  if (pairs.size() < 2) throw InsufficientSamples("mutual information needs at least 2 pairs");
  if (pairs.dim() != map.dim()) throw DimensionMismatch("pair dimension differs from n");
  if (config.a_dim == 0 || config.a_dim >= pairs.dim()) {
    throw InvalidArgument("a_dim must split the pair into two nonempty parts");
  }
  if (!(config.eval_fraction > 0.0 && config.eval_fraction < 1.0)) {
    throw InvalidArgument("eval_fraction must lie in (0, 1)");
  }
  const std::size_t total = pairs.size();
  std::size_t n_eval = static_cast<std::size_t>(std::llround(config.eval_fraction * static_cast<double>(total)));
  n_eval = std::clamp<std::size_t>(n_eval, 1, total - 1);
  const std::size_t n_train = total - n_eval;

  const double m = static_cast<double>(map.neurons());
  TrainConfig tc;
  tc.T = config.T;
  tc.alpha = config.alpha > 0.0 ? config.alpha : std::pow(static_cast<double>(config.T), -2.0 / 3.0);
  tc.r = config.r > 0.0 ? config.r : 1.0 / m;
  tc.box_bound = config.box_bound;
  tc.sample_radius = config.sample_radius;
  tc.policy = config.policy;

  ShuffledPairSampler sampler(pairs, n_train, config.a_dim, derive_seed(config.seed, {0}));
  const TrainResult trained = run(tc, map, sampler);

  PointSet joint(pairs.dim()), product(pairs.dim());
  joint.reserve(n_eval);
  product.reserve(n_eval);
  Rng rng(derive_seed(config.seed, {1}));
  const std::vector<std::size_t> partner = random_permutation(n_eval, rng);
  for (std::size_t i = 0; i < n_eval; ++i) {
    const auto row = pairs[n_train + i];
    const auto other = pairs[n_train + partner[i]];
    joint.push_back(row);
    auto dst = product.emplace_back();
    std::copy(row.begin(), row.begin() + config.a_dim, dst.begin());
    std::copy(other.begin() + config.a_dim, other.end(), dst.begin() + config.a_dim);
  }
  return dv_estimate(map, trained.theta_bar, joint, product);
}

}  // namespace rfkl
