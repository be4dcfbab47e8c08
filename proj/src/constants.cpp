#include "rfkl/constants.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "rfkl/error.hpp"

namespace rfkl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_dim(int n) {
  if (n < 1) throw InvalidArgument("dimension must be at least 1, got " + std::to_string(n));
}

void require_radius_rho(double radius, double rho) {
  if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
  if (!(rho > 0.0)) throw InvalidArgument("smoothness bound rho must be positive");
}

}  // namespace

std::optional<double> guarded_exp(double x) {
  if (!(x <= kExpCeiling)) return std::nullopt;
  return std::exp(x);
}

double sphere_area(int n) {
  require_dim(n);
  const double h = 0.5 * n;
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

double half_integral_constant(int n) {
  require_dim(n);
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (n - 1)) / std::tgamma(0.5 * (n + 1));
}

double dimension_factor(int n) {
  return 2.0 * sphere_area(n) / std::pow(2.0 * std::numbers::pi, n);
}

double kappa(int n, double radius, double rho) {
  require_dim(n);
  require_radius_rho(radius, rho);
  const double R = radius;
  return (16.0 * R * R + 32.0 * R + 21.0 * std::sqrt(static_cast<double>(n)) * R + 36.0) *
         dimension_factor(n) * rho;
}

double c_theta(int n, double radius, double rho) {
  require_dim(n);
  require_radius_rho(radius, rho);
  const double R = radius;
  return (2.0 * R + 4.0 + 3.0 * std::sqrt(static_cast<double>(n)) + 4.0 / R) *
         dimension_factor(n) * rho;
}

ProblemConstants ProblemConstants::make(int n, double radius, double rho) {
  ProblemConstants pc;
  pc.n = n;
  pc.radius = radius;
  pc.rho = rho;
  pc.sphere_area = rfkl::sphere_area(n);
  pc.half_integral = half_integral_constant(n);
  pc.c_theta = rfkl::c_theta(n, radius, rho);
  pc.kappa = rfkl::kappa(n, radius, rho);
  return pc;
}

std::string_view to_string(BoundStatus s) {
  return s == BoundStatus::ok ? "ok" : "vacuous";
}

OptimizerConstants optimizer_constants(const ProblemConstants& pc,
                                       std::size_t m) {
  if (m == 0) throw InvalidArgument("m must be at least 1");
  OptimizerConstants oc;
  const double x = pc.radius * pc.c_theta;
  const double sm = std::sqrt(static_cast<double>(m));
  const double R = pc.radius;
  oc.d_theta = 2.0 * pc.c_theta / sm;

  auto e2 = guarded_exp(2.0 * x);
  auto e4 = guarded_exp(4.0 * x);
  auto e6 = guarded_exp(6.0 * x);
  oc.d_z = e2.value_or(kInf);
  oc.nu = e2.value_or(kInf);
  oc.z_hi = e2.value_or(kInf);
  oc.z_lo = std::exp(-2.0 * x);
  oc.l_z = e2 ? 2.0 * R * sm * *e2 : kInf;
  oc.g = e4 ? 2.0 * R * sm * (1.0 + *e4) : kInf;
  oc.l_f = e6 ? 2.0 * R * sm * *e6 : kInf;
  if (!e2 || !e4 || !e6 || !std::isfinite(oc.g) || !std::isfinite(oc.l_f)) {
    oc.status = BoundStatus::vacuous;
  }
  return oc;
}

BoundReport rate_constants(const ProblemConstants& pc) {
  BoundReport br;
  const double R = pc.radius;
  const double C = pc.c_theta;
  const double x = R * C;

  auto e4 = guarded_exp(4.0 * x);
  auto e8 = guarded_exp(8.0 * x);
  auto e10 = guarded_exp(10.0 * x);
  auto e12 = guarded_exp(12.0 * x);

  br.b1 = e8 ? 2.0 * R * C * *e8 : kInf;
  br.b2 = 0.5 * C * C;
  br.b3 = (e8 && e12 && e4)
              ? 8.0 * R * R * R * C * (*e8 + *e12) + 2.0 * R * R * (1.0 + *e4) * (1.0 + *e4)
              : kInf;
  br.b4 = e10 ? 2.0 * R * C * *e10 : kInf;

  const double c1 = std::pow(2.0, -2.0 / 3.0) + std::pow(2.0, 1.0 / 3.0);
  br.beta1 = c1 * std::cbrt(br.b1) * std::pow(std::cbrt(br.b4), 2.0);
  br.beta2 = 2.0 * std::sqrt(br.b2) * std::sqrt(br.b3);

  for (double v : {br.b1, br.b3, br.b4, br.beta1, br.beta2}) {
    if (!std::isfinite(v)) br.status = BoundStatus::vacuous;
  }
  if (br.status == BoundStatus::vacuous) {
    for (double* v : {&br.b1, &br.b3, &br.b4, &br.beta1, &br.beta2}) {
      if (!std::isfinite(*v)) *v = kInf;
    }
  }
  return br;
}

BoundReport theorem_bound(int n, std::size_t m, std::uint64_t T, double radius,
                          double rho, double delta) {
  if (m < 1) throw InvalidArgument("m must be at least 1");
  if (T < 2) throw InvalidArgument("T must be at least 2");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0, 1)");
  const ProblemConstants pc = ProblemConstants::make(n, radius, rho);
  BoundReport br = rate_constants(pc);

  const double Td = static_cast<double>(T);
  const double md = static_cast<double>(m);
  br.alpha = std::pow(2.0, 2.0 / 3.0) * std::pow(Td, -2.0 / 3.0);
  br.r = std::pow(Td, 1.0 / 6.0) * std::pow(2.0, -2.0 / 3.0) *
         std::sqrt(br.b2 / br.b3) / md;
  br.approx_term = 2.0 * pc.kappa *
                   (std::sqrt(static_cast<double>(n)) + std::sqrt(std::log(1.0 / delta))) /
                   std::sqrt(md);
  br.opt_term = br.beta1 * std::pow(Td, -1.0 / 3.0) + br.beta2 * std::pow(Td, -0.5);
  br.total = br.approx_term + br.opt_term;
  if (br.status == BoundStatus::vacuous || !std::isfinite(br.total)) {
    br.status = BoundStatus::vacuous;
    br.opt_term = kInf;
    br.total = kInf;
  }
  return br;
}

std::string_view to_string(ScheduleKind k) {
  return k == ScheduleKind::theorem ? "theorem" : "experiment";
}

ScheduleKind parse_schedule_kind(std::string_view s) {
  if (s == "theorem") return ScheduleKind::theorem;
  if (s == "experiment") return ScheduleKind::experiment;
  throw InvalidArgument("unknown schedule '" + std::string(s) +
                        "' (expected theorem or experiment)");
}

Schedule schedule(ScheduleKind kind, std::uint64_t T, std::size_t m,
                  const ProblemConstants& pc) {
  if (T < 1) throw InvalidArgument("schedule needs T >= 1");
  if (m < 1) throw InvalidArgument("schedule needs m >= 1");
  const double Td = static_cast<double>(T);
  const double md = static_cast<double>(m);
  Schedule s;
  if (kind == ScheduleKind::experiment) {
    s.alpha = std::pow(Td, -2.0 / 3.0);
    s.r = 1.0 / md;
    return s;
  }
  // alpha = 2^{2/3} T^{-2/3} exceeds 1 at T = 1.
  if (T < 2) throw InvalidArgument("theorem schedule needs T >= 2");
  const BoundReport br = rate_constants(pc);
  if (br.status == BoundStatus::vacuous) {
    throw NumericalFailure("theorem schedule undefined: rate constants overflow (R C_Theta = " +
                           std::to_string(pc.radius * pc.c_theta) + ")");
  }
  s.alpha = std::pow(2.0, 2.0 / 3.0) * std::pow(Td, -2.0 / 3.0);
  s.r = std::pow(Td, 1.0 / 6.0) * std::pow(2.0, -2.0 / 3.0) * std::sqrt(br.b2 / br.b3) / md;
  return s;
}

std::vector<ConstantsRow> constants_grid(std::span<const int> n_values,
                                         std::span<const double> rho_values,
                                         double radius) {
  if (n_values.empty() || rho_values.empty()) {
    throw InvalidArgument("constants grid needs nonempty n and rho lists");
  }
  std::vector<ConstantsRow> rows;
  rows.reserve(n_values.size() * rho_values.size());
  for (int n : n_values) {
    for (double rho : rho_values) {
      const ProblemConstants pc = ProblemConstants::make(n, radius, rho);
      const BoundReport br = rate_constants(pc);
      rows.push_back({n, rho, pc.kappa, br.beta1, br.beta2, br.status});
    }
  }
  return rows;
}

}  // namespace rfkl
