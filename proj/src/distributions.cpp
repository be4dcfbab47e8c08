#include "rfkl/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "rfkl/error.hpp"
#include "rfkl/numeric.hpp"

namespace rfkl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

void validate_box(std::size_t dim, double a) {
  if (dim == 0) throw InvalidArgument("dimension must be at least 1");
  if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("half-width must be positive and finite");
}

bool in_box(std::span<const double> x, double a) {
  return std::all_of(x.begin(), x.end(), [a](double v) { return std::abs(v) <= a; });
}

// Standard normal truncated to [lo, hi], by inversion. Uses the upper tail
// when both bounds are positive to keep precision.
double truncated_normal(Rng& rng, double lo, double hi) {
  const double u = rng.uniform_open();
  if (lo > 0.0) {
    const double ql = 0.5 * std::erfc(lo / std::numbers::sqrt2);
    const double qh = 0.5 * std::erfc(hi / std::numbers::sqrt2);
    return -normal_quantile(qh + u * (ql - qh));
  }
  if (hi < 0.0) return -truncated_normal(rng, -hi, -lo);
  const double pl = normal_cdf(lo);
  const double ph = normal_cdf(hi);
  return normal_quantile(pl + u * (ph - pl));
}

// Product of the two marginals of a CorrelatedGaussianBox2D.
class MarginalProduct2D final : public BoxDistribution {
 public:
  explicit MarginalProduct2D(CorrelatedGaussianBox2D joint) : joint_(std::move(joint)) {}

  std::size_t dim() const override { return 2; }
  double half_width() const override { return joint_.half_width(); }
  std::string name() const override { return "corr_gauss_marginals"; }
  void sample(Rng& rng, std::span<double> out) const override {
    double tmp[2];
    joint_.sample(rng, tmp);
    out[0] = tmp[0];
    joint_.sample(rng, tmp);
    out[1] = tmp[1];
  }
  double log_density(std::span<const double> x) const override {
    return joint_.marginal_log_density_of(x[0]) + joint_.marginal_log_density_of(x[1]);
  }
  bool is_product() const override { return true; }
  double marginal_log_density(double t) const override { return joint_.marginal_log_density_of(t); }

 private:
  CorrelatedGaussianBox2D joint_;
};

}  // namespace

PointSet BoxDistribution::sample_n(Rng& rng, std::size_t count) const {
  PointSet out(dim());
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) sample(rng, out.emplace_back());
  return out;
}

double BoxDistribution::circumradius() const {
  return half_width() * std::sqrt(static_cast<double>(dim()));
}

TruncatedGaussianBox::TruncatedGaussianBox(std::size_t dim, double half_width)
    : dim_(dim), a_(half_width) {
  validate_box(dim, half_width);
  mass_ = std::erf(a_ / std::numbers::sqrt2);
  log_norm_ = kLogSqrt2Pi + std::log(mass_);
}

void TruncatedGaussianBox::sample(Rng& rng, std::span<double> out) const {
  if (out.size() != dim_) throw DimensionMismatch("output dimension differs from n");
  for (double& v : out) {
    const double u = rng.uniform_open();
    v = std::numbers::sqrt2 * boost::math::erf_inv(mass_ * (2.0 * u - 1.0));
    v = std::clamp(v, -a_, a_);
  }
}

double TruncatedGaussianBox::marginal_log_density(double t) const {
  if (std::abs(t) > a_) return kNegInf;
  return -0.5 * t * t - log_norm_;
}

double TruncatedGaussianBox::log_density(std::span<const double> x) const {
  if (x.size() != dim_) throw DimensionMismatch("point dimension differs from n");
  double s = 0.0;
  for (double v : x) {
    if (std::abs(v) > a_) return kNegInf;
    s += -0.5 * v * v - log_norm_;
  }
  return s;
}

UniformBox::UniformBox(std::size_t dim, double half_width) : dim_(dim), a_(half_width) {
  validate_box(dim, half_width);
}

void UniformBox::sample(Rng& rng, std::span<double> out) const {
  if (out.size() != dim_) throw DimensionMismatch("output dimension differs from n");
  for (double& v : out) v = rng.uniform(-a_, a_);
}

double UniformBox::marginal_log_density(double t) const {
  return std::abs(t) <= a_ ? -std::log(2.0 * a_) : kNegInf;
}

double UniformBox::log_density(std::span<const double> x) const {
  if (x.size() != dim_) throw DimensionMismatch("point dimension differs from n");
  if (!in_box(x, a_)) return kNegInf;
  return -static_cast<double>(dim_) * std::log(2.0 * a_);
}

CorrelatedGaussianBox2D::CorrelatedGaussianBox2D(double half_width, double correlation)
    : a_(half_width), c_(correlation) {
  validate_box(2, half_width);
  if (!(std::abs(c_) < 1.0)) throw InvalidArgument("correlation must lie in (-1, 1)");
  s_ = std::sqrt(1.0 - c_ * c_);
  // Box mass of the untruncated bivariate normal, integrating out x2 exactly.
  const auto slab = [this](double t) {
    const double h = normal_cdf((a_ - c_ * t) / s_) - normal_cdf((-a_ - c_ * t) / s_);
    return std::exp(-0.5 * t * t - kLogSqrt2Pi) * h;
  };
  const double mass = integrate(slab, -a_, a_, {1e-13, 1e-13, 20}).value;
  log_norm_ = std::log(2.0 * std::numbers::pi * s_) + std::log(mass);
}

void CorrelatedGaussianBox2D::sample(Rng& rng, std::span<double> out) const {
  if (out.size() != 2) throw DimensionMismatch("output dimension must be 2");
  // Marginal of x1 is the truncated normal reweighted by the conditional
  // slab probability, which is at most 1.
  double x1 = 0.0;
  for (;;) {
    x1 = truncated_normal(rng, -a_, a_);
    const double h = normal_cdf((a_ - c_ * x1) / s_) - normal_cdf((-a_ - c_ * x1) / s_);
    if (rng.uniform() < h) break;
  }
  const double lo = (-a_ - c_ * x1) / s_;
  const double hi = (a_ - c_ * x1) / s_;
  out[0] = x1;
  out[1] = std::clamp(c_ * x1 + s_ * truncated_normal(rng, lo, hi), -a_, a_);
}

double CorrelatedGaussianBox2D::log_density(std::span<const double> x) const {
  if (x.size() != 2) throw DimensionMismatch("point dimension must be 2");
  if (!in_box(x, a_)) return kNegInf;
  const double q = (x[0] * x[0] - 2.0 * c_ * x[0] * x[1] + x[1] * x[1]) / (s_ * s_);
  return -0.5 * q - log_norm_;
}

double CorrelatedGaussianBox2D::marginal_log_density_of(double t) const {
  if (std::abs(t) > a_) return kNegInf;
  const double h = normal_cdf((a_ - c_ * t) / s_) - normal_cdf((-a_ - c_ * t) / s_);
  // log_norm_ includes 2 pi s; the marginal needs the 1D factor only.
  return -0.5 * t * t + std::log(h) - kLogSqrt2Pi -
         (log_norm_ - std::log(2.0 * std::numbers::pi * s_));
}

std::shared_ptr<const BoxDistribution> CorrelatedGaussianBox2D::product_of_marginals() const {
  return std::make_shared<MarginalProduct2D>(*this);
}

std::shared_ptr<const BoxDistribution> make_distribution(const DistributionSpec& spec,
                                                         std::size_t dim) {
  if (spec.kind == "trunc_gauss") return std::make_shared<TruncatedGaussianBox>(dim, spec.a);
  if (spec.kind == "uniform") return std::make_shared<UniformBox>(dim, spec.a);
  if (spec.kind == "corr_gauss") {
    if (dim != 2) throw InvalidArgument("corr_gauss is defined for dimension 2 only");
    return std::make_shared<CorrelatedGaussianBox2D>(spec.a, spec.correlation);
  }
  throw InvalidArgument("unknown distribution kind '" + spec.kind +
                        "' (expected trunc_gauss, uniform or corr_gauss)");
}

double DistributionPair::enclosing_radius() const {
  return std::max(p->circumradius(), q->circumradius());
}

IndependentPairSampler::IndependentPairSampler(const DistributionPair& pair,
                                               std::uint64_t p_seed, std::uint64_t q_seed)
    : pair_(pair), p_rng_(p_seed), q_rng_(q_seed) {
  if (!pair.p || !pair.q) throw InvalidArgument("distribution pair is incomplete");
  if (pair.p->dim() != pair.q->dim()) throw DimensionMismatch("P and Q dimensions differ");
}

void IndependentPairSampler::draw(std::span<double> x, std::span<double> y) {
  pair_.p->sample(p_rng_, x);
  pair_.q->sample(q_rng_, y);
}

double kl_1d(const BoxDistribution& p, const BoxDistribution& q) {
  const double a = p.half_width();
  if (q.half_width() < a) return std::numeric_limits<double>::infinity();
  const auto f = [&](double t) {
    const double lp = p.marginal_log_density(t);
    if (lp == kNegInf) return 0.0;
    return std::exp(lp) * (lp - q.marginal_log_density(t));
  };
  return integrate(f, -a, a, {1e-12, 1e-13, 25}).value;
}

namespace {

// Tensor Gauss-Legendre nodes on [-a, a]^n, calling f(point, weight).
template <class F>
void for_each_tensor_node(std::size_t dim, double a, std::size_t nodes, F&& f) {
  const QuadratureRule rule = gauss_legendre(nodes, -a, a);
  std::vector<std::size_t> idx(dim, 0);
  std::vector<double> x(dim);
  for (;;) {
    double w = 1.0;
    for (std::size_t d = 0; d < dim; ++d) {
      x[d] = rule.nodes[idx[d]];
      w *= rule.weights[idx[d]];
    }
    f(std::span<const double>(x), w);
    std::size_t d = 0;
    while (d < dim && ++idx[d] == nodes) idx[d++] = 0;
    if (d == dim) break;
  }
}

std::size_t max_tensor_nodes(std::size_t dim) { return dim == 1 ? 4096 : dim == 2 ? 1024 : 128; }

}  // namespace

double kl_tensor(const DistributionPair& pair, std::size_t nodes_per_axis) {
  const std::size_t n = pair.dim();
  if (n > 3) throw InvalidArgument("tensor quadrature is limited to n <= 3");
  if (nodes_per_axis == 0) throw InvalidArgument("node count must be positive");
  const double a = pair.p->half_width();
  if (pair.q->half_width() < a) return std::numeric_limits<double>::infinity();
  std::vector<double> terms;
  for_each_tensor_node(n, a, nodes_per_axis, [&](std::span<const double> x, double w) {
    const double lp = pair.p->log_density(x);
    if (lp == kNegInf) return;
    terms.push_back(w * std::exp(lp) * (lp - pair.q->log_density(x)));
  });
  return pairwise_sum(terms);
}

DiscreteMeasure tensor_measure(const BoxDistribution& d, std::size_t nodes_per_axis) {
  if (d.dim() > 3) throw InvalidArgument("tensor quadrature is limited to n <= 3");
  if (nodes_per_axis == 0) throw InvalidArgument("node count must be positive");
  DiscreteMeasure m;
  m.points = PointSet(d.dim());
  for_each_tensor_node(d.dim(), d.half_width(), nodes_per_axis, [&](std::span<const double> x, double w) {
    m.points.push_back(x);
    m.weights.push_back(w * std::exp(d.log_density(x)));
  });
  const double total = pairwise_sum(m.weights);
  if (!(total > 0.0)) throw QuadratureFailure("density has no mass on the quadrature nodes");
  for (double& w : m.weights) w /= total;
  return m;
}

KlResult exact_kl(const DistributionPair& pair, std::size_t mc_samples, std::uint64_t mc_seed) {
  if (!pair.p || !pair.q) throw InvalidArgument("distribution pair is incomplete");
  const std::size_t n = pair.dim();
  if (pair.q->dim() != n) throw DimensionMismatch("P and Q dimensions differ");
  KlResult res;
  if (pair.p == pair.q) return res;

  if (pair.p->is_product() && pair.q->is_product()) {
    res.method = KlMethod::product_1d;
    res.value = static_cast<double>(n) * kl_1d(*pair.p, *pair.q);
    return res;
  }
  if (n <= 3) {
    res.method = KlMethod::tensor_gauss_legendre;
    std::size_t nodes = 16;
    double prev = kl_tensor(pair, nodes);
    while (nodes * 2 <= max_tensor_nodes(n)) {
      nodes *= 2;
      const double cur = kl_tensor(pair, nodes);
      const bool converged = std::abs(cur - prev) < 1e-8;
      prev = cur;
      if (converged) {
        res.value = cur;
        res.nodes = nodes;
        return res;
      }
    }
    throw QuadratureFailure("tensor quadrature did not converge within " +
                            std::to_string(max_tensor_nodes(n)) + " nodes per axis");
  }
  if (mc_samples < 2) {
    throw InvalidArgument("non-product pair in dimension > 3 needs a Monte-Carlo sample count");
  }
  res.method = KlMethod::monte_carlo;
  Rng rng(mc_seed);
  std::vector<double> x(n), vals(mc_samples);
  for (std::size_t i = 0; i < mc_samples; ++i) {
    pair.p->sample(rng, x);
    vals[i] = pair.p->log_density(x) - pair.q->log_density(x);
  }
  const double mean = pairwise_sum(vals) / static_cast<double>(mc_samples);
  double ss = 0.0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  res.value = mean;
  res.std_error = std::sqrt(ss / static_cast<double>(mc_samples - 1) / static_cast<double>(mc_samples));
  return res;
}

KlResult exact_mi(const CorrelatedGaussianBox2D& d) {
  auto joint = std::make_shared<CorrelatedGaussianBox2D>(d);
  return exact_kl({joint, d.product_of_marginals()});
}

}  // namespace rfkl
