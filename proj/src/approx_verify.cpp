#include "rfkl/approx_verify.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "rfkl/constants.hpp"
#include "rfkl/error.hpp"
#include "rfkl/numeric.hpp"

namespace rfkl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kRadialTol = 1e-9;
constexpr std::size_t kSphereResolution2 = 256;
constexpr std::size_t kSphereResolution3 = 48;

void require_envelope(const SpectralFunction& f) {
  if (!(f.envelope_amplitude > 0.0)) throw InvalidArgument("spectrum of '" + f.name + "' is identically zero");
  if (!(f.envelope_rate > 0.0) || !std::isfinite(f.envelope_rate)) {
    throw NonIntegrableSpectrum("spectrum of '" + f.name + "' has no decaying envelope");
  }
}

// Radius beyond which amplitude * s^power * exp(-rate s^2) is negligible.
double tail_cutoff(const SpectralFunction& f, int power) {
  const double a = f.envelope_amplitude;
  const double lam = f.envelope_rate;
  double s = std::max(1.0, std::sqrt(power / (2.0 * lam)));
  while (a * std::pow(s, power) * std::exp(-lam * s * s) > 1e-17 * std::max(1.0, a)) s += 0.25;
  return s;
}

// int_0^cutoff h(s) ds over panels, for integrands carrying the envelope.
double radial_integral(const std::function<double(double)>& h, double cutoff) {
  std::vector<double> breaks;
  const int panels = 8;
  for (int i = 1; i < panels; ++i) breaks.push_back(cutoff * i / panels);
  return integrate(h, 0.0, cutoff, breaks, {kRadialTol, 1e-12, 25}).value;
}

std::complex<double> ghat_at(const SpectralFunction& f, std::span<const double> dir, double s,
                             std::vector<double>& buf) {
  for (std::size_t i = 0; i < dir.size(); ++i) buf[i] = s * dir[i];
  return f.ghat(buf);
}

double golden_max(const std::function<double(double)>& h, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = h(c), fd = h(d);
  while (b - a > 1e-10) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = h(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = h(d);
    }
  }
  return std::max({fc, fd, h(lo), h(hi)});
}

std::size_t default_sphere_resolution(std::size_t dim) {
  return dim == 2 ? kSphereResolution2 : kSphereResolution3;
}

}  // namespace

double SpectralFunction::magnitude(std::span<const double> w) const {
  return std::abs(ghat(w));
}

double SpectralFunction::phase(std::span<const double> w) const {
  const std::complex<double> v = ghat(w);
  if (v == 0.0) return 0.0;
  double t = std::arg(v) / kTwoPi;
  if (t <= -0.5) t += 1.0;
  return t;
}

SpectralFunction gaussian_bump(std::size_t dim) {
  if (dim == 0) throw InvalidArgument("dimension must be at least 1");
  SpectralFunction f;
  f.name = "gaussian";
  f.dim = dim;
  auto sq = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
  };
  f.g = [sq](std::span<const double> x) { return std::exp(-kPi * sq(x)); };
  f.ghat = [sq](std::span<const double> w) { return std::complex<double>(std::exp(-kPi * sq(w)), 0.0); };
  f.radial = true;
  f.radial_magnitude = [](double s) { return std::exp(-kPi * s * s); };
  f.envelope_amplitude = 1.0;
  f.envelope_rate = kPi;
  return f;
}

SpectralFunction gaussian_mixture(std::size_t dim, std::vector<double> centers,
                                  std::vector<double> amplitudes) {
  if (dim == 0) throw InvalidArgument("dimension must be at least 1");
  if (amplitudes.empty() || centers.size() != amplitudes.size() * dim) {
    throw DimensionMismatch("mixture needs one center of dimension n per amplitude");
  }
  SpectralFunction f;
  f.name = "gaussian_mixture";
  f.dim = dim;
  const std::size_t k = amplitudes.size();
  f.g = [=](std::span<const double> x) {
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        const double d = x[i] - centers[j * dim + i];
        d2 += d * d;
      }
      total += amplitudes[j] * std::exp(-kPi * d2);
    }
    return total;
  };
  f.ghat = [=](std::span<const double> w) {
    double w2 = 0.0;
    for (double v : w) w2 += v * v;
    std::complex<double> total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      double wc = 0.0;
      for (std::size_t i = 0; i < dim; ++i) wc += w[i] * centers[j * dim + i];
      total += amplitudes[j] * std::polar(1.0, -kTwoPi * wc);
    }
    return total * std::exp(-kPi * w2);
  };
  double amp = 0.0;
  for (double a : amplitudes) amp += std::abs(a);
  f.envelope_amplitude = amp;
  f.envelope_rate = kPi;
  return f;
}

SpectralFunction default_mixture(std::size_t dim) {
  if (dim < 2) throw InvalidArgument("the default mixture needs dimension >= 2");
  std::vector<double> centers(2 * dim, 0.0);
  centers[0] = 0.3;
  centers[dim] = -0.2;
  centers[dim + 1] = 0.4;
  return gaussian_mixture(dim, std::move(centers), {1.0, 0.5});
}

SpectralFunction scaled(const SpectralFunction& f, double c) {
  SpectralFunction out = f;
  out.name = f.name + "_scaled";
  out.g = [g = f.g, c](std::span<const double> x) { return c * g(x); };
  out.ghat = [h = f.ghat, c](std::span<const double> w) { return c * h(w); };
  if (f.radial) {
    if (c < 0.0) {
      // A negative multiple is real but not nonnegative.
      out.radial = false;
      out.radial_magnitude = nullptr;
    } else {
      out.radial_magnitude = [r = f.radial_magnitude, c](double s) { return c * r(s); };
    }
  }
  out.envelope_amplitude = std::abs(c) * f.envelope_amplitude;
  return out;
}

SphereRule sphere_rule(std::size_t dim, std::size_t resolution) {
  if (resolution == 0) throw InvalidArgument("sphere resolution must be positive");
  SphereRule rule;
  rule.directions = PointSet(dim);
  if (dim == 1) {
    rule.directions.push_back(std::vector<double>{1.0});
    rule.directions.push_back(std::vector<double>{-1.0});
    rule.weights = {1.0, 1.0};
  } else if (dim == 2) {
    for (std::size_t i = 0; i < resolution; ++i) {
      const double t = kTwoPi * (static_cast<double>(i) + 0.5) / static_cast<double>(resolution);
      rule.directions.push_back(std::vector<double>{std::cos(t), std::sin(t)});
      rule.weights.push_back(kTwoPi / static_cast<double>(resolution));
    }
  } else if (dim == 3) {
    const QuadratureRule gl = gauss_legendre(resolution, -1.0, 1.0);
    const std::size_t az = 2 * resolution;
    for (std::size_t i = 0; i < resolution; ++i) {
      const double z = gl.nodes[i];
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      for (std::size_t j = 0; j < az; ++j) {
        const double t = kTwoPi * (static_cast<double>(j) + 0.5) / static_cast<double>(az);
        rule.directions.push_back(std::vector<double>{rho * std::cos(t), rho * std::sin(t), z});
        rule.weights.push_back(gl.weights[i] * kTwoPi / static_cast<double>(az));
      }
    }
  } else {
    throw InvalidArgument("sphere rules are implemented for n <= 3");
  }
  return rule;
}

double f_norm(const SpectralFunction& f, int k) {
  require_envelope(f);
  const std::size_t n = f.dim;
  if (k == 0) k = static_cast<int>(n) + 3;
  if (k < 0) throw InvalidArgument("F-norm order must be nonnegative");

  std::function<double(double)> mag;
  if (f.radial) {
    mag = [&f](double s) { return std::abs(f.radial_magnitude(s)); };
  } else {
    if (n > 3) throw InvalidArgument("non-radial spectra are supported for n <= 3");
    auto rule = std::make_shared<SphereRule>(sphere_rule(n, n == 2 ? 720 : 96));
    mag = [&f, rule, n](double s) {
      std::vector<double> buf(n);
      double best = 0.0;
      for (std::size_t d = 0; d < rule->directions.size(); ++d) {
        best = std::max(best, std::abs(ghat_at(f, rule->directions[d], s, buf)));
      }
      return best;
    };
  }
  const auto h = [&](double s) { return mag(s) * (1.0 + std::pow(kTwoPi * s, k)); };
  const double amp = f.envelope_amplitude;
  const double lam = f.envelope_rate;
  const auto tail = [&](double s) { return amp * std::exp(-lam * s * s) * (1.0 + std::pow(kTwoPi * s, k)); };

  // The envelope term is decreasing beyond sqrt(k / (2 lam)).
  const double s_mono = std::sqrt(k / (2.0 * lam));
  double cutoff = std::max(1.0, 2.0 * s_mono);
  const std::size_t grid_points = f.radial ? 4000 : 800;
  for (;;) {
    double best = 0.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i <= grid_points; ++i) {
      const double v = h(cutoff * static_cast<double>(i) / grid_points);
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    if (best == 0.0) throw InvalidArgument("spectrum of '" + f.name + "' vanishes on the radial grid");
    if (tail(cutoff) <= best) {
      const double step = cutoff / grid_points;
      const double lo = std::max(0.0, (static_cast<double>(arg) - 1.0) * step);
      const double hi = std::min(cutoff, (static_cast<double>(arg) + 1.0) * step);
      return std::max(best, golden_max(h, lo, hi));
    }
    cutoff *= 2.0;
    if (cutoff > 1e6) throw NonIntegrableSpectrum("F-norm tail bound does not settle");
  }
}

RepresentationDensity::RepresentationDensity(SpectralFunction spec, double radius,
                                             std::vector<double> v, double r_const,
                                             double z_norm, double f_norm_value)
    : spec_(std::move(spec)),
      radius_(radius),
      v_(std::move(v)),
      r_const_(r_const),
      z_norm_(z_norm),
      f_norm_(f_norm_value) {
  if (!(radius_ > 0.0)) throw InvalidArgument("radius must be positive");
  if (v_.size() != spec_.dim) throw DimensionMismatch("linear term length differs from n");
  double s = 0.0;
  for (double x : v_) s += x * x;
  v_norm_ = std::sqrt(s);
}

double RepresentationDensity::xi(std::span<const double> w, double b) const {
  const std::size_t n = dim();
  if (w.size() != n) throw DimensionMismatch("direction dimension differs from n");
  const int power = static_cast<int>(n) + 1;
  const double cutoff = tail_cutoff(spec_, power);
  std::function<double(double)> integrand;
  if (spec_.radial) {
    integrand = [&](double s) {
      const double u = kTwoPi * s;
      return u * u * std::pow(s, static_cast<double>(n) - 1.0) * spec_.radial_magnitude(s) *
             std::cos(kTwoPi * s * b);
    };
  } else {
    std::vector<double> buf(n);
    integrand = [&, buf](double s) mutable {
      const double u = kTwoPi * s;
      const std::complex<double> v = ghat_at(spec_, w, s, buf) * std::polar(1.0, -kTwoPi * s * b);
      return u * u * std::pow(s, static_cast<double>(n) - 1.0) * v.real();
    };
  }
  return -radial_integral(integrand, cutoff);
}

double RepresentationDensity::zeta(double b) const {
  const double sign = b > 0.0 ? 1.0 : (b < 0.0 ? -1.0 : 0.0);
  return 2.0 * r_const_ * sign / (sphere_area(static_cast<int>(dim())) * radius_ * radius_);
}

double RepresentationDensity::p_lin(std::span<const double> w) const {
  if (w.size() != dim()) throw DimensionMismatch("direction dimension differs from n");
  double vw = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) vw += v_[i] * w[i];
  const double sign = vw > 0.0 ? 1.0 : (vw < 0.0 ? -1.0 : 0.0);
  return v_norm_ * sign / (half_integral_constant(static_cast<int>(dim())) * radius_);
}

double RepresentationDensity::ell(std::span<const double> w, double b) const {
  return xi(w, b) + zeta(b) + p_lin(w);
}

double RepresentationDensity::ell_bound() const {
  const double n = static_cast<double>(dim());
  const double R = radius_;
  return (1.0 + 2.0 * (1.0 + R) / (R * R) + std::sqrt(n * kPi / 2.0) / R) * xi_bound();
}

double RepresentationDensity::v_bound() const {
  return dimension_factor(static_cast<int>(dim())) * f_norm_;
}

double RepresentationDensity::r_bound() const { return (radius_ + 1.0) * v_bound(); }

double RepresentationDensity::xi_bound() const {
  return 2.0 / std::pow(kTwoPi, static_cast<double>(dim())) * f_norm_;
}

RepresentationDensity build_representation(const SpectralFunction& spec, double radius) {
  require_envelope(spec);
  if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
  const std::size_t n = spec.dim;
  const double nd = static_cast<double>(n);
  const double cutoff = tail_cutoff(spec, static_cast<int>(n) + 1);
  const double fn = f_norm(spec);
  const double R = radius;

  std::vector<double> v(n, 0.0);
  double r_const = 0.0, z_norm = 0.0;
  if (spec.radial) {
    // Real, nonnegative and isotropic: the linear term cancels by symmetry.
    const double area = sphere_area(static_cast<int>(n));
    r_const = area * radial_integral(
                         [&](double s) {
                           const double t = kTwoPi * s * R;
                           return std::pow(s, nd - 1.0) * spec.radial_magnitude(s) *
                                  (t * std::sin(t) + std::cos(t));
                         },
                         cutoff);
    z_norm = area * radial_integral(
                        [&](double s) {
                          const double u = kTwoPi * s;
                          return u * u * std::pow(s, nd - 1.0) * spec.radial_magnitude(s);
                        },
                        cutoff);
  } else {
    if (n > 3) throw InvalidArgument("non-radial spectra are supported for n <= 3");
    const SphereRule rule = sphere_rule(n, default_sphere_resolution(n));
    std::vector<double> buf(n);
    for (std::size_t d = 0; d < rule.directions.size(); ++d) {
      const auto dir = rule.directions[d];
      const double w = rule.weights[d];
      const auto shifted = [&](double s) {
        return ghat_at(spec, dir, s, buf) * std::polar(1.0, -kTwoPi * s * R);
      };
      const double lin = radial_integral(
          [&](double s) { return std::pow(s, nd - 1.0) * kTwoPi * s * shifted(s).imag(); }, cutoff);
      const double cst = radial_integral(
          [&](double s) {
            const std::complex<double> e = shifted(s);
            return std::pow(s, nd - 1.0) * (-kTwoPi * s * R * e.imag() + e.real());
          },
          cutoff);
      const double zz = radial_integral(
          [&](double s) {
            const double u = kTwoPi * s;
            return u * u * std::pow(s, nd - 1.0) * std::abs(ghat_at(spec, dir, s, buf));
          },
          cutoff);
      for (std::size_t i = 0; i < n; ++i) v[i] -= w * lin * dir[i];
      r_const += w * cst;
      z_norm += w * zz;
    }
  }
  return RepresentationDensity(spec, radius, std::move(v), r_const, z_norm, fn);
}

std::vector<double> spectral_l1_moments(const SpectralFunction& spec) {
  require_envelope(spec);
  const std::size_t n = spec.dim;
  const double nd = static_cast<double>(n);
  const double cutoff = tail_cutoff(spec, static_cast<int>(n) + 1);
  std::vector<double> out(3, 0.0);
  for (int i = 0; i < 3; ++i) {
    if (spec.radial) {
      out[i] = sphere_area(static_cast<int>(n)) *
               radial_integral(
                   [&](double s) {
                     return std::pow(s, nd - 1.0) * std::abs(spec.radial_magnitude(s)) *
                            std::pow(kTwoPi * s, i);
                   },
                   cutoff);
    } else {
      if (n > 3) throw InvalidArgument("non-radial spectra are supported for n <= 3");
      const SphereRule rule = sphere_rule(n, default_sphere_resolution(n));
      std::vector<double> buf(n);
      for (std::size_t d = 0; d < rule.directions.size(); ++d) {
        const auto dir = rule.directions[d];
        out[i] += rule.weights[d] *
                  radial_integral(
                      [&](double s) {
                        return std::pow(s, nd - 1.0) * std::abs(ghat_at(spec, dir, s, buf)) *
                               std::pow(kTwoPi * s, i);
                      },
                      cutoff);
      }
    }
  }
  return out;
}

std::vector<double> sample_coefficients(const RepresentationDensity& rep, const FeatureMap& map) {
  if (rep.dim() != map.dim()) throw DimensionMismatch("representation and feature map dimensions differ");
  if (std::abs(rep.radius() - map.radius()) > 1e-12 * rep.radius()) {
    throw InvalidArgument("representation and feature map radii differ");
  }
  const std::size_t m = map.neurons();
  const double scale = 2.0 * rep.radius() * sphere_area(static_cast<int>(rep.dim())) / static_cast<double>(m);
  std::vector<double> c(m);
  for (std::size_t i = 0; i < m; ++i) c[i] = scale * rep.ell(map.weight(i), map.bias(i));
  return c;
}

double coefficient_bound(int n, double radius, double f_norm_value, std::size_t m) {
  if (m == 0) throw InvalidArgument("m must be positive");
  return c_theta(n, radius, f_norm_value) / static_cast<double>(m);
}

double approximation_bound(int n, double radius, double f_norm_value, std::size_t m, double delta) {
  if (m == 0) throw InvalidArgument("m must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  return kappa(n, radius, f_norm_value) * (std::sqrt(static_cast<double>(n)) + std::sqrt(std::log(1.0 / delta))) /
         std::sqrt(static_cast<double>(m));
}

namespace {

// Enumerates lattice lines along the first axis covering B_{R + h sqrt(n)/2}.
template <class F>
void for_each_line(std::size_t dim, double radius, double spacing, F&& f) {
  if (dim == 0) throw InvalidArgument("dimension must be at least 1");
  if (!(radius > 0.0) || !(spacing > 0.0)) throw InvalidArgument("radius and spacing must be positive");
  const double reach = radius + spacing * std::sqrt(static_cast<double>(dim)) / 2.0;
  const long kmax = static_cast<long>(std::floor(reach / spacing));
  std::vector<long> idx(dim - 1, -kmax);
  std::vector<double> rest(dim - 1);
  for (;;) {
    double r2 = 0.0;
    for (std::size_t i = 0; i + 1 < dim; ++i) {
      rest[i] = static_cast<double>(idx[i]) * spacing;
      r2 += rest[i] * rest[i];
    }
    if (r2 <= reach * reach) {
      const long k = static_cast<long>(std::floor(std::sqrt(reach * reach - r2) / spacing));
      f(rest, -k, k);
    }
    std::size_t d = 0;
    while (d < idx.size() && ++idx[d] > kmax) idx[d++] = -kmax;
    if (d == idx.size()) break;
  }
}

}  // namespace

PointSet ball_grid(std::size_t dim, double radius, double spacing) {
  PointSet out(dim);
  for_each_line(dim, radius, spacing, [&](const std::vector<double>& rest, long lo, long hi) {
    for (long k = lo; k <= hi; ++k) {
      auto p = out.emplace_back();
      p[0] = static_cast<double>(k) * spacing;
      std::copy(rest.begin(), rest.end(), p.begin() + 1);
    }
  });
  return out;
}

LinfGrid make_linf_grid(const std::function<double(std::span<const double>)>& g,
                        std::size_t dim, double radius, double spacing) {
  LinfGrid grid;
  grid.dim = dim;
  grid.radius = radius;
  grid.spacing = spacing;
  std::vector<double> x(dim);
  for_each_line(dim, radius, spacing, [&](const std::vector<double>& rest, long lo, long hi) {
    grid.lines.push_back({rest, lo, hi, grid.g_values.size()});
    std::copy(rest.begin(), rest.end(), x.begin() + 1);
    for (long k = lo; k <= hi; ++k) {
      x[0] = static_cast<double>(k) * spacing;
      grid.g_values.push_back(g(x));
    }
  });
  return grid;
}

std::vector<double> network_on_grid(const FeatureMap& map, std::span<const double> coefficients,
                                    const LinfGrid& grid) {
  if (map.dim() != grid.dim) throw DimensionMismatch("feature map and grid dimensions differ");
  if (coefficients.size() != map.neurons()) throw DimensionMismatch("coefficient count differs from m");
  const double h = grid.spacing;
  std::vector<double> out(grid.size());
  std::vector<double> d_slope, d_icpt;
  for (const auto& line : grid.lines) {
    const long count = line.k_hi - line.k_lo + 1;
    d_slope.assign(count + 1, 0.0);
    d_icpt.assign(count + 1, 0.0);
    double const_part = 0.0;
    for (std::size_t i = 0; i < map.neurons(); ++i) {
      const auto w = map.weight(i);
      double offset = map.bias(i);
      for (std::size_t d = 1; d < grid.dim; ++d) offset += w[d] * line.rest[d - 1];
      const double c = coefficients[i];
      const double w0 = w[0];
      if (w0 == 0.0) {
        const_part += c * std::max(0.0, offset);
        continue;
      }
      // Active where w0 k h + offset > 0; t is the onset in units of h.
      const double t = -offset / (w0 * h);
      if (w0 > 0.0) {
        long first = static_cast<long>(std::floor(t)) + 1;
        first = std::clamp(first, line.k_lo, line.k_hi + 1);
        d_slope[first - line.k_lo] += c * w0;
        d_icpt[first - line.k_lo] += c * offset;
      } else {
        long last = static_cast<long>(std::ceil(t)) - 1;
        last = std::clamp(last, line.k_lo - 1, line.k_hi);
        d_slope[0] += c * w0;
        d_icpt[0] += c * offset;
        d_slope[last + 1 - line.k_lo] -= c * w0;
        d_icpt[last + 1 - line.k_lo] -= c * offset;
      }
    }
    double slope = 0.0, icpt = const_part;
    for (long j = 0; j < count; ++j) {
      slope += d_slope[j];
      icpt += d_icpt[j];
      const double x0 = static_cast<double>(line.k_lo + j) * h;
      out[line.offset + j] = slope * x0 + icpt;
    }
  }
  return out;
}

double network_lipschitz(std::span<const double> coefficients, double g_lipschitz) {
  double s = std::abs(g_lipschitz);
  for (double c : coefficients) s += std::abs(c);
  return s;
}

LinfError measure_linf_error(const LinfGrid& grid, const FeatureMap& map,
                             std::span<const double> coefficients, double lipschitz) {
  if (grid.size() == 0) throw EmptySampleSet("L-infinity grid has no points");
  const std::vector<double> net = network_on_grid(map, coefficients, grid);
  LinfError e;
  for (std::size_t i = 0; i < net.size(); ++i) e.grid_max = std::max(e.grid_max, std::abs(net[i] - grid.g_values[i]));
  e.spacing = grid.spacing;
  e.points = grid.size();
  e.slack = lipschitz * grid.spacing * std::sqrt(static_cast<double>(grid.dim)) / 2.0;
  e.value = e.grid_max + e.slack;
  return e;
}

LinfError measure_linf_error_refined(std::span<const LinfGrid> grids, const FeatureMap& map,
                                     std::span<const double> coefficients, double lipschitz) {
  if (grids.empty()) throw EmptySampleSet("no L-infinity grids supplied");
  LinfError e;
  for (const auto& grid : grids) {
    e = measure_linf_error(grid, map, coefficients, lipschitz);
    if (e.slack <= 0.1 * e.grid_max) break;
  }
  return e;
}

double spectral_lipschitz(const SpectralFunction& spec) { return spectral_l1_moments(spec)[1]; }

}  // namespace rfkl
