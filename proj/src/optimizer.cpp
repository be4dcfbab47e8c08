#include "rfkl/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rfkl/error.hpp"
#include "rfkl/numeric.hpp"

namespace rfkl {

namespace {

constexpr double kRelSlack = 1e-12;

double norm2(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// Returns false when the sample must be rejected; clips in place otherwise.
bool admit_sample(std::span<double> x, double radius, DomainPolicy policy) {
  const double nx = norm2(x);
  if (nx <= radius * (1.0 + kRelSlack)) return true;
  if (policy == DomainPolicy::reject) return false;
  const double scale = radius / nx;
  for (double& v : x) v *= scale;
  return true;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void validate_step_params(const StepParams& p) {
  if (!(p.alpha > 0.0 && p.alpha <= 1.0)) throw InvalidArgument("step size alpha must lie in (0, 1]");
  if (!(p.r > 0.0)) throw InvalidArgument("gradient scale r must be positive");
  if (!(p.box_bound > 0.0)) throw InvalidArgument("box bound must be positive");
  if (!(p.sample_radius > 0.0)) throw InvalidArgument("sample radius must be positive");
}

// The update itself, on preallocated feature buffers.
void apply_update(ParamState& s, std::span<const double> phx,
                  std::span<const double> phy, double alpha, double r,
                  double bound) {
  const double e = std::exp(dot(phy, s.theta));
  const double ar = alpha * r;
  const double ratio = e / s.z;
  const std::size_t m = s.theta.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double th = s.theta[i];
    s.theta_sum[i] += th;
    const double t = th + ar * (phx[i] - ratio * phy[i]);
    s.theta[i] = std::clamp(t, -bound, bound);
  }
  s.z += alpha * (e - s.z);
  ++s.k;
}

}  // namespace

std::vector<double> project_box(std::span<const double> theta, double bound) {
  std::vector<double> out(theta.begin(), theta.end());
  project_box_inplace(out, bound);
  return out;
}

void project_box_inplace(std::span<double> theta, double bound) {
  if (!(bound > 0.0)) throw InvalidArgument("box bound must be positive");
  for (double& v : theta) v = std::clamp(v, -bound, bound);
}

ParamState ParamState::initial(std::vector<double> theta0, double z0) {
  if (!(z0 > 0.0)) throw InvalidArgument("initial tracker z0 must be positive");
  ParamState s;
  s.theta_sum.assign(theta0.size(), 0.0);
  s.theta = std::move(theta0);
  s.z = z0;
  return s;
}

std::vector<double> ParamState::average() const {
  if (k == 0) throw InvalidArgument("no iterates to average");
  std::vector<double> avg(theta_sum.size());
  const double inv = 1.0 / static_cast<double>(k);
  for (std::size_t i = 0; i < avg.size(); ++i) avg[i] = theta_sum[i] * inv;
  return avg;
}

ParamState step(const ParamState& state, const FeatureMap& map,
                std::span<const double> x, std::span<const double> y,
                const StepParams& params) {
  validate_step_params(params);
  if (state.theta.size() != map.neurons()) throw DimensionMismatch("theta length differs from m");
  if (x.size() != map.dim() || y.size() != map.dim()) throw DimensionMismatch("sample dimension differs from n");
  std::vector<double> xs(x.begin(), x.end()), ys(y.begin(), y.end());
  if (!admit_sample(xs, params.sample_radius, params.policy) ||
      !admit_sample(ys, params.sample_radius, params.policy)) {
    throw DomainViolation("sample outside the ball of radius " + std::to_string(params.sample_radius));
  }
  ParamState next = state;
  const std::vector<double> phx = map.phi(xs);
  const std::vector<double> phy = map.phi(ys);
  apply_update(next, phx, phy, params.alpha, params.r, params.box_bound);
  return next;
}

TrainResult run(const TrainConfig& config, const FeatureMap& map,
                PairSampler& sampler, const StepObserver& observer) {
  const std::size_t m = map.neurons();
  const std::size_t n = map.dim();
  validate_step_params({config.alpha, config.r, config.box_bound, config.sample_radius, config.policy});
  if (config.T < 1) throw InvalidArgument("T must be at least 1");

  std::vector<double> theta0 = config.theta0;
  if (theta0.empty()) theta0.assign(m, 0.0);
  if (theta0.size() != m) throw DimensionMismatch("theta0 length differs from m");
  for (double v : theta0) {
    if (!(std::abs(v) <= config.box_bound)) throw InvalidArgument("theta0 outside the coefficient box");
  }
  if (config.z_interval &&
      !(config.z0 >= config.z_interval->first && config.z0 <= config.z_interval->second)) {
    throw InvalidArgument("z0 outside the tracker interval");
  }

  TrainResult result;
  ParamState s = ParamState::initial(std::move(theta0), config.z0);
  std::vector<double> x(n), y(n), phx(m), phy(m);

  const std::uint64_t stride =
      config.trace_stride > 0 ? config.trace_stride : std::max<std::uint64_t>(1, config.T / 1000);
  double ema_psi_x = 0.0;
  const std::uint64_t max_rejections = 10 * config.T + 1000;

  auto check = [&](const ParamState& st) {
    if (!config.check_invariants) return;
    const double lim = config.box_bound * (1.0 + kRelSlack);
    for (double v : st.theta) {
      if (!(std::abs(v) <= lim)) {
        ++result.theta_violations;
        break;
      }
    }
    if (config.z_interval) {
      const auto [lo, hi] = *config.z_interval;
      if (!(st.z >= lo * (1.0 - kRelSlack) && st.z <= hi * (1.0 + kRelSlack))) ++result.z_violations;
    }
  };
  check(s);

  while (s.k < config.T) {
    sampler.draw(x, y);
    if (!admit_sample(x, config.sample_radius, config.policy) ||
        !admit_sample(y, config.sample_radius, config.policy)) {
      if (++result.rejected_samples > max_rejections) {
        throw DomainViolation("too many samples outside the ball of radius " +
                              std::to_string(config.sample_radius));
      }
      continue;
    }
    if (observer) observer(s, x, y);
    map.phi(x, phx);
    map.phi(y, phy);
    if (config.record_trace) {
      ema_psi_x += config.alpha * (dot(phx, s.theta) - ema_psi_x);
      if (s.k % stride == 0) {
        double inf_norm = 0.0;
        for (double v : s.theta) inf_norm = std::max(inf_norm, std::abs(v));
        result.trace.push_back({s.k, s.z, inf_norm, ema_psi_x - std::log(s.z)});
      }
    }
    apply_update(s, phx, phy, config.alpha, config.r, config.box_bound);
    if (!std::isfinite(s.z) || !(s.z > 0.0)) {
      throw NumericalFailure("tracker z left (0, inf) at step " + std::to_string(s.k));
    }
    check(s);
  }

  result.theta_bar = s.average();
  result.final_state = std::move(s);
  return result;
}

DiscreteMeasure DiscreteMeasure::empirical(PointSet points) {
  if (points.empty()) throw EmptySampleSet("empirical measure of an empty sample");
  DiscreteMeasure d;
  d.weights.assign(points.size(), 1.0 / static_cast<double>(points.size()));
  d.points = std::move(points);
  return d;
}

namespace {

void validate_measure(const DiscreteMeasure& d, const FeatureMap& map) {
  if (d.points.empty() || d.points.size() != d.weights.size()) {
    throw QuadratureFailure("measure has no atoms or mismatched weights");
  }
  if (d.points.dim() != map.dim()) throw DimensionMismatch("measure dimension differs from n");
  double total = 0.0;
  for (double w : d.weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw QuadratureFailure("negative or non-finite weight");
    total += w;
  }
  if (!(std::abs(total - 1.0) < 1e-9)) throw QuadratureFailure("measure weights do not sum to one");
}

// Log-weights of Q_theta: log w_j + psi(y_j), normalized.
std::vector<double> tilted_weights(const FeatureMap& map,
                                   std::span<const double> theta,
                                   const DiscreteMeasure& q,
                                   double* log_normalizer) {
  std::vector<double> lw(q.points.size());
  for (std::size_t j = 0; j < lw.size(); ++j) {
    lw[j] = std::log(q.weights[j]) + map.psi(q.points[j], theta);
  }
  const double lz = log_sum_exp(lw);
  for (double& v : lw) v = std::exp(v - lz);
  if (log_normalizer) *log_normalizer = lz;
  return lw;
}

}  // namespace

double exact_objective(const FeatureMap& map, std::span<const double> theta,
                       const DiscreteMeasure& p, const DiscreteMeasure& q) {
  validate_measure(p, map);
  validate_measure(q, map);
  std::vector<double> terms(p.points.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    terms[i] = p.weights[i] * map.psi(p.points[i], theta);
  }
  double lz = 0.0;
  tilted_weights(map, theta, q, &lz);
  return -pairwise_sum(terms) + lz;
}

std::vector<double> exact_gradient(const FeatureMap& map,
                                   std::span<const double> theta,
                                   const DiscreteMeasure& p,
                                   const DiscreteMeasure& q) {
  validate_measure(p, map);
  validate_measure(q, map);
  const std::size_t m = map.neurons();
  std::vector<double> grad(m, 0.0), ph(m);
  for (std::size_t i = 0; i < p.points.size(); ++i) {
    map.phi(p.points[i], ph);
    for (std::size_t k = 0; k < m; ++k) grad[k] -= p.weights[i] * ph[k];
  }
  const std::vector<double> tw = tilted_weights(map, theta, q, nullptr);
  for (std::size_t j = 0; j < q.points.size(); ++j) {
    map.phi(q.points[j], ph);
    for (std::size_t k = 0; k < m; ++k) grad[k] += tw[j] * ph[k];
  }
  return grad;
}

std::vector<double> exact_hessian(const FeatureMap& map,
                                  std::span<const double> theta,
                                  const DiscreteMeasure& q) {
  validate_measure(q, map);
  const std::size_t m = map.neurons();
  const std::vector<double> tw = tilted_weights(map, theta, q, nullptr);
  std::vector<double> mean(m, 0.0), ph(m), second(m * m, 0.0);
  for (std::size_t j = 0; j < q.points.size(); ++j) {
    map.phi(q.points[j], ph);
    for (std::size_t a = 0; a < m; ++a) {
      mean[a] += tw[j] * ph[a];
      for (std::size_t b = 0; b < m; ++b) second[a * m + b] += tw[j] * ph[a] * ph[b];
    }
  }
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) second[a * m + b] -= mean[a] * mean[b];
  }
  return second;
}

double exact_normalizer(const FeatureMap& map, std::span<const double> theta,
                        const DiscreteMeasure& q) {
  validate_measure(q, map);
  double lz = 0.0;
  tilted_weights(map, theta, q, &lz);
  return std::exp(lz);
}

}  // namespace rfkl
