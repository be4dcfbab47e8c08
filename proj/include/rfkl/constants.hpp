#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace rfkl {

/// Largest exponent handed to exp() before a bound is declared vacuous.
inline constexpr double kExpCeiling = 700.0;

/// exp(x), or nullopt when x exceeds kExpCeiling. Every exponential of the
/// form e^{c R C_Theta} goes through here.
std::optional<double> guarded_exp(double x);

/// Surface area A_{n-1} = 2 pi^{n/2} / Gamma(n/2) of the unit sphere in R^n.
double sphere_area(int n);

/// H_{n-1} = 2 pi^{(n-1)/2} / Gamma((n+1)/2), the integral of |z_1| over
/// the unit sphere.
double half_integral_constant(int n);

/// 2 A_{n-1} / (2 pi)^n, the factor every constant is built from.
double dimension_factor(int n);

double kappa(int n, double radius, double rho);
double c_theta(int n, double radius, double rho);

struct ProblemConstants {
  int n = 0;
  double radius = 0.0;
  double rho = 0.0;
  double sphere_area = 0.0;     // A_{n-1}
  double half_integral = 0.0;   // H_{n-1}
  double c_theta = 0.0;
  double kappa = 0.0;

  static ProblemConstants make(int n, double radius, double rho);

  /// Half-width of the coefficient box: C_Theta / m.
  double box_bound(std::size_t m) const {
    return c_theta / static_cast<double>(m);
  }
};

enum class BoundStatus { ok, vacuous };

std::string_view to_string(BoundStatus s);

/// Quantities controlling the optimization error, all for a given m.
struct OptimizerConstants {
  double d_theta = 0.0;  // diameter of Theta
  double d_z = 0.0;      // diameter bound of Z
  double l_z = 0.0;      // Lipschitz constant of z*
  double g = 0.0;        // bound on the update direction
  double l_f = 0.0;      // Lipschitz constant of the direction in z
  double nu = 0.0;       // standard deviation bound
  double z_lo = 0.0;     // Z = [z_lo, z_hi]
  double z_hi = 0.0;
  BoundStatus status = BoundStatus::ok;
};

OptimizerConstants optimizer_constants(const ProblemConstants& pc,
                                       std::size_t m);

struct BoundReport {
  BoundStatus status = BoundStatus::ok;
  double b1 = 0.0, b2 = 0.0, b3 = 0.0, b4 = 0.0;
  double beta1 = 0.0, beta2 = 0.0;
  double alpha = 0.0;  // optimal step size
  double r = 0.0;      // optimal gradient scale
  double approx_term = 0.0;
  double opt_term = 0.0;
  double total = 0.0;
};

/// Rate constants b1..b4, beta1, beta2 (independent of m, T and delta).
/// Fields that depend on m, T, delta are left zero.
BoundReport rate_constants(const ProblemConstants& pc);

/// Full high-probability error bound for the averaged iterate. Requires
/// m >= 1, T >= 2, delta in (0, 1). When an exponent passes kExpCeiling or a
/// product overflows, status is vacuous and the numeric fields that could
/// not be formed are +inf.
BoundReport theorem_bound(int n, std::size_t m, std::uint64_t T, double radius,
                          double rho, double delta);

enum class ScheduleKind { theorem, experiment };

std::string_view to_string(ScheduleKind k);
ScheduleKind parse_schedule_kind(std::string_view s);

struct Schedule {
  double alpha = 0.0;
  double r = 0.0;
};

/// theorem: alpha = 2^{2/3} T^{-2/3}, r = T^{1/6} 2^{-2/3} sqrt(b2/b3) / m.
/// experiment: alpha = T^{-2/3}, r = 1/m.
Schedule schedule(ScheduleKind kind, std::uint64_t T, std::size_t m,
                  const ProblemConstants& pc);

struct ConstantsRow {
  int n = 0;
  double rho = 0.0;
  double kappa = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  BoundStatus status = BoundStatus::ok;
};

/// One row per (n, rho), n outer and rho inner, in input order.
std::vector<ConstantsRow> constants_grid(std::span<const int> n_values,
                                         std::span<const double> rho_values,
                                         double radius);

}  // namespace rfkl
