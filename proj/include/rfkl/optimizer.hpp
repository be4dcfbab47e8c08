#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rfkl/features.hpp"
#include "rfkl/points.hpp"

namespace rfkl {

/// Euclidean projection onto the box [-bound, bound]^m.
std::vector<double> project_box(std::span<const double> theta, double bound);
void project_box_inplace(std::span<double> theta, double bound);

struct ParamState {
  std::vector<double> theta;
  double z = 1.0;
  std::uint64_t k = 0;
  /// Sum of theta_0 .. theta_{k-1}.
  std::vector<double> theta_sum;

  static ParamState initial(std::vector<double> theta0, double z0);
  std::vector<double> average() const;
};

enum class DomainPolicy { reject, clip };

struct StepParams {
  double alpha = 0.0;
  double r = 0.0;
  double box_bound = 0.0;  // C_Theta / m
  /// Samples with norm above this are rejected or clipped.
  double sample_radius = 0.0;
  DomainPolicy policy = DomainPolicy::reject;
};

/// One projected stochastic-gradient step on a sample (x from P, y from Q):
///   theta+ = Pi(theta + alpha r (phi(x) - e^{phi(y).theta} phi(y) / z))
///   z+     = z + alpha (e^{phi(y).theta} - z)
/// both evaluated at the pre-update theta, which is added to theta_sum.
/// Throws DomainViolation under the reject policy when a sample lies outside
/// the sample radius.
ParamState step(const ParamState& state, const FeatureMap& map,
                std::span<const double> x, std::span<const double> y,
                const StepParams& params);

/// Source of i.i.d. pairs from P (x) and Q (y).
class PairSampler {
 public:
  virtual ~PairSampler() = default;
  virtual void draw(std::span<double> x, std::span<double> y) = 0;
};

struct TrainConfig {
  double alpha = 0.0;
  double r = 0.0;
  std::uint64_t T = 1;
  std::vector<double> theta0;  // empty means zero
  double z0 = 1.0;
  double box_bound = 0.0;
  double sample_radius = 0.0;
  DomainPolicy policy = DomainPolicy::reject;
  /// 0 selects max(1, T/1000); trace is off when record_trace is false.
  std::uint64_t trace_stride = 0;
  bool record_trace = false;
  /// When set, every iterate is checked against Theta and this z interval.
  std::optional<std::pair<double, double>> z_interval;
  bool check_invariants = false;
};

struct TracePoint {
  std::uint64_t k = 0;
  double z = 0.0;
  double theta_inf_norm = 0.0;
  /// Smoothed psi(x_k) minus log z_k; the psi average uses the same
  /// exponential weighting alpha that z applies to e^{psi(y_k)}.
  double running_dv = 0.0;
};

struct TrainResult {
  std::vector<double> theta_bar;
  ParamState final_state;
  std::vector<TracePoint> trace;
  std::uint64_t rejected_samples = 0;
  std::uint64_t theta_violations = 0;
  std::uint64_t z_violations = 0;
};

/// Called with the pre-update state and the sample of every step.
using StepObserver =
    std::function<void(const ParamState&, std::span<const double> x,
                       std::span<const double> y)>;

/// Runs T accepted steps and returns the average of theta_0 .. theta_{T-1}.
/// Rejected samples are redrawn and counted; more than 10 T + 1000 rejections
/// raise DomainViolation.
TrainResult run(const TrainConfig& config, const FeatureMap& map,
                PairSampler& sampler, const StepObserver& observer = {});

/// A probability measure with finitely many atoms (quadrature nodes or an
/// empirical sample). Weights are nonnegative and sum to one.
struct DiscreteMeasure {
  PointSet points;
  std::vector<double> weights;

  static DiscreteMeasure empirical(PointSet points);
};

/// f(theta) = -E_P[phi(x).theta] + log E_Q[e^{phi(y).theta}] under the given
/// measures.
double exact_objective(const FeatureMap& map, std::span<const double> theta,
                       const DiscreteMeasure& p, const DiscreteMeasure& q);

/// grad f = -E_P[phi(x)] + E_{Q_theta}[phi(y)], where Q_theta reweights Q by
/// e^{phi(y).theta}.
std::vector<double> exact_gradient(const FeatureMap& map,
                                   std::span<const double> theta,
                                   const DiscreteMeasure& p,
                                   const DiscreteMeasure& q);

/// Covariance of phi(y) under Q_theta, row-major m x m.
std::vector<double> exact_hessian(const FeatureMap& map,
                                  std::span<const double> theta,
                                  const DiscreteMeasure& q);

/// z*(theta) = E_Q[e^{phi(y).theta}].
double exact_normalizer(const FeatureMap& map, std::span<const double> theta,
                        const DiscreteMeasure& q);

}  // namespace rfkl
