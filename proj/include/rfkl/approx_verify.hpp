#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rfkl/features.hpp"
#include "rfkl/points.hpp"

namespace rfkl {

/// A test function g on R^n together with its closed-form Fourier transform
/// ghat(w) = int e^{-j 2 pi w.x} g(x) dx. The magnitude/phase split is
/// ghat = |ghat| e^{j 2 pi phase}, phase measured in cycles.
struct SpectralFunction {
  std::string name;
  std::size_t dim = 0;
  std::function<double(std::span<const double>)> g;
  std::function<std::complex<double>(std::span<const double>)> ghat;
  /// Set when ghat is real, nonnegative and depends on |w| only; then
  /// `radial_magnitude(s)` gives ghat at radius s.
  bool radial = false;
  std::function<double(double)> radial_magnitude;
  /// Gaussian envelope |ghat(w)| <= amplitude * exp(-rate |w|^2), used for
  /// the tail of every radial integral and the sup tail bound.
  double envelope_amplitude = 0.0;
  double envelope_rate = 0.0;

  double magnitude(std::span<const double> w) const;
  /// Phase theta(w) in cycles, in (-1/2, 1/2].
  double phase(std::span<const double> w) const;
};

/// g(x) = exp(-pi |x|^2), whose transform is exp(-pi |w|^2).
SpectralFunction gaussian_bump(std::size_t dim);

/// g(x) = sum_j a_j exp(-pi |x - c_j|^2); not radial, so its integral
/// representation has a nonzero linear part. `centers` is row-major.
SpectralFunction gaussian_mixture(std::size_t dim, std::vector<double> centers,
                                  std::vector<double> amplitudes);

/// The two-center mixture used by the verification catalog.
SpectralFunction default_mixture(std::size_t dim);

/// c * f
SpectralFunction scaled(const SpectralFunction& f, double c);

/// ||g||_{F^k} = sup_w |ghat(w)| (1 + (2 pi |w|)^k), taken over a radial grid
/// (and a direction grid when ghat is not radial), refined by golden-section
/// search around the best grid point, plus the envelope tail bound beyond the
/// grid. k = 0 selects n + 3. Throws InvalidArgument for ghat == 0 and
/// NonIntegrableSpectrum when the envelope does not decay.
double f_norm(const SpectralFunction& f, int k = 0);

/// Directions and weights integrating over the unit sphere S^{n-1} with the
/// surface measure (weights sum to A_{n-1}). Exact for n = 1, trapezoid on
/// the circle for n = 2, Gauss-Legendre x trapezoid for n = 3.
struct SphereRule {
  PointSet directions;
  std::vector<double> weights;
};
SphereRule sphere_rule(std::size_t dim, std::size_t resolution);

/// Density l = xi + zeta + p over S^{n-1} x [-R, R] with
///   g(x) = int_S int_{-R}^{R} l(w, b) relu(w.x + b) db dmu(w),  |x| <= R.
/// xi carries the ReLU part of the Fourier representation, zeta absorbs the
/// constant r_const and p absorbs the linear term v.x.
class RepresentationDensity {
 public:
  RepresentationDensity(SpectralFunction spec, double radius,
                        std::vector<double> v, double r_const, double z_norm,
                        double f_norm_value);

  const SpectralFunction& spec() const { return spec_; }
  std::size_t dim() const { return spec_.dim; }
  double radius() const { return radius_; }
  std::span<const double> v() const { return v_; }
  double r_const() const { return r_const_; }
  double z_norm() const { return z_norm_; }
  double f_norm() const { return f_norm_; }

  /// xi(w, b) = -int_0^inf (2 pi s)^2 s^{n-1} Re(ghat(s w) e^{-j 2 pi s b}) ds
  double xi(std::span<const double> w, double b) const;
  /// zeta(b) = 2 r_const sign(b) / (A_{n-1} R^2)
  double zeta(double b) const;
  /// p(w) = |v| sign(v.w) / (H_{n-1} R)
  double p_lin(std::span<const double> w) const;
  double ell(std::span<const double> w, double b) const;

  /// (1 + 2 (1 + R)/R^2 + sqrt(n pi / 2)/R) (2/(2 pi)^n) ||g||
  double ell_bound() const;
  /// (2 A_{n-1}/(2 pi)^n) ||g||
  double v_bound() const;
  /// (R + 1) (2 A_{n-1}/(2 pi)^n) ||g||
  double r_bound() const;
  /// (2/(2 pi)^n) ||g||
  double xi_bound() const;

 private:
  SpectralFunction spec_;
  double radius_;
  std::vector<double> v_;
  double r_const_;
  double z_norm_;
  double f_norm_;
  double v_norm_;
};

/// Computes v, r_const and Z by quadrature over w (radial integrals with an
/// analytic envelope tail; a sphere rule for non-radial transforms, n <= 3).
RepresentationDensity build_representation(const SpectralFunction& spec,
                                           double radius);

/// L1 moments int |ghat(w)| |2 pi w|^i dw for i = 0, 1, 2.
std::vector<double> spectral_l1_moments(const SpectralFunction& spec);

/// c_i = 2 R A_{n-1} l(w_i, b_i) / m.
std::vector<double> sample_coefficients(const RepresentationDensity& rep,
                                        const FeatureMap& map);

/// (2R + 4 + 3 sqrt(n) + 4/R) (2 A_{n-1}/(2 pi)^n) ||g|| / m
double coefficient_bound(int n, double radius, double f_norm_value,
                         std::size_t m);

/// (sqrt(n) + sqrt(log(1/delta))) kappa(n, R, ||g||) / sqrt(m)
double approximation_bound(int n, double radius, double f_norm_value,
                           std::size_t m, double delta);

/// Cube-lattice points of spacing h whose norm is at most R + h sqrt(n)/2,
/// so every point of B_R lies within h sqrt(n)/2 of one of them.
PointSet ball_grid(std::size_t dim, double radius, double spacing);

/// The same lattice organized as lines along the first axis, with g cached
/// at every point so one grid serves many trials.
struct LinfGrid {
  struct Line {
    std::vector<double> rest;  // coordinates 2..n
    long k_lo = 0;             // first coordinate runs over k h, k_lo..k_hi
    long k_hi = 0;
    std::size_t offset = 0;    // index of the first point in g_values
  };
  std::size_t dim = 0;
  double radius = 0.0;
  double spacing = 0.0;
  std::vector<Line> lines;
  std::vector<double> g_values;

  std::size_t size() const { return g_values.size(); }
};

LinfGrid make_linf_grid(const std::function<double(std::span<const double>)>& g,
                        std::size_t dim, double radius, double spacing);

/// sum_i c_i relu(w_i.x + b_i) at every grid point, in g_values order. Each
/// line costs O(m + points) through difference arrays over activation onsets.
std::vector<double> network_on_grid(const FeatureMap& map,
                                    std::span<const double> coefficients,
                                    const LinfGrid& grid);

struct LinfError {
  double grid_max = 0.0;  // max over the grid of |g_N - g|
  double slack = 0.0;     // L h sqrt(n)/2
  double value = 0.0;     // grid_max + slack
  double spacing = 0.0;
  std::size_t points = 0;
};

/// sum_i |c_i| + `g_lipschitz`: a Lipschitz constant of g_N - g.
double network_lipschitz(std::span<const double> coefficients,
                         double g_lipschitz);

/// Max over the grid of |g_N - g| plus the Lipschitz slack for its spacing.
LinfError measure_linf_error(const LinfGrid& grid, const FeatureMap& map,
                             std::span<const double> coefficients,
                             double lipschitz);

/// Walks `grids` (ordered by decreasing spacing) and returns the first
/// measurement whose slack is at most 10% of its grid maximum, or the finest.
LinfError measure_linf_error_refined(std::span<const LinfGrid> grids,
                                     const FeatureMap& map,
                                     std::span<const double> coefficients,
                                     double lipschitz);

/// Lipschitz bound of g from the first spectral moment int |ghat| |2 pi w|.
double spectral_lipschitz(const SpectralFunction& spec);

}  // namespace rfkl
