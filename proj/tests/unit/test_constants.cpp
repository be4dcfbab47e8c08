#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "generators.hpp"
#include "oracles.hpp"
#include "rfkl/constants.hpp"
#include "rfkl/error.hpp"

using namespace rfkl;
using oracle::mp;

using oracle::rel_close;
using Oracle = oracle::Constants;

namespace {

Oracle oracle_of(int n, double R, double rho, std::size_t m, std::uint64_t T, double delta) {
  return oracle::constants(n, R, rho, m, T, delta);
}

}  // namespace

TEST_CASE("sphere areas in low dimension") {
  CHECK(sphere_area(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(sphere_area(2) == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-15));
  CHECK(sphere_area(3) == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-15));
  CHECK_THROWS_AS(sphere_area(0), InvalidArgument);
}

TEST_CASE("half-integral constants in low dimension") {
  CHECK(half_integral_constant(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(half_integral_constant(2) == doctest::Approx(4.0).epsilon(1e-15));
  // 2 pi / Gamma(2) = 2 pi; the integral of |z_1| over the unit 2-sphere.
  CHECK(half_integral_constant(3) == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-15));
  CHECK_THROWS_AS(half_integral_constant(0), InvalidArgument);
}

TEST_CASE("H_2 agrees with a Monte-Carlo estimate of the |z_1| integral") {
  Rng rng(21);
  const int N = 100000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < N; ++i) {
    const auto z = gen::normal_vector(rng, 3);
    const double v = std::abs(z[0]) / std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]) * sphere_area(3);
    s += v;
    s2 += v * v;
  }
  const double mean = s / N, se = std::sqrt((s2 / N - mean * mean) / N);
  CHECK(std::abs(mean - half_integral_constant(3)) < 3.0 * se);
}

TEST_CASE("A_{n-1} and H_{n-1} match the extended-precision gamma for n = 1..30") {
  for (int n = 1; n <= 30; ++n) {
    const Oracle o = oracle_of(n, 1.0, 1.0, 1, 2, 0.5);
    CHECK(rel_close(sphere_area(n), o.A, 1e-12));
    CHECK(rel_close(half_integral_constant(n), o.H, 1e-12));
  }
}

TEST_CASE("std::tgamma is accurate to 1e-12 on [0.5, 30]") {
  for (double x = 0.5; x <= 30.0; x += 0.25) {
    CHECK(rel_close(std::tgamma(x), boost::math::tgamma(mp(x)), 1e-12));
  }
}

TEST_CASE("kappa at n = 2, R = 2, rho = 1") {
  const double expected = (64 + 64 + 42 * std::sqrt(2.0) + 36) / std::numbers::pi;
  CHECK(kappa(2, 2.0, 1.0) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(kappa(2, 2.0, 1.0) == doctest::Approx(71.11).epsilon(1e-4));
}

TEST_CASE("kappa and C_Theta are linear in rho and reject nonpositive inputs") {
  gen::for_all(100, 22, [](Rng& rng, std::size_t) {
    const int n = 1 + static_cast<int>(rng.below(10));
    const double R = rng.uniform(0.1, 5.0), rho = rng.uniform(0.01, 10.0);
    CHECK(kappa(n, R, 2 * rho) == doctest::Approx(2 * kappa(n, R, rho)).epsilon(1e-15));
    CHECK(c_theta(n, R, 2 * rho) == doctest::Approx(2 * c_theta(n, R, rho)).epsilon(1e-15));
  });
  CHECK_THROWS_AS(kappa(2, 2.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(c_theta(2, 2.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(kappa(2, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(c_theta(2, -1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(kappa(0, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("theorem bound at the default 2D configuration matches the oracle") {
  const BoundReport b = theorem_bound(2, 50, 500000, 2.0, 1.0, 0.1);
  const Oracle o = oracle_of(2, 2.0, 1.0, 50, 500000, 0.1);
  REQUIRE(b.status == BoundStatus::ok);
  CHECK(rel_close(b.b1, o.b1, 1e-9));
  CHECK(rel_close(b.b2, o.b2, 1e-9));
  CHECK(rel_close(b.b3, o.b3, 1e-9));
  CHECK(rel_close(b.b4, o.b4, 1e-9));
  CHECK(rel_close(b.beta1, o.beta1, 1e-9));
  CHECK(rel_close(b.beta2, o.beta2, 1e-9));
  CHECK(rel_close(b.alpha, o.alpha, 1e-9));
  CHECK(rel_close(b.r, o.r, 1e-9));
  CHECK(rel_close(b.approx_term, o.approx, 1e-9));
  CHECK(rel_close(b.opt_term, o.opt, 1e-9));
  CHECK(rel_close(b.total, o.total, 1e-9));
  CHECK(b.total == b.approx_term + b.opt_term);
}

TEST_CASE("property: theorem bound matches the oracle on random tuples") {
  gen::for_all(200, 23, [](Rng& rng, std::size_t) {
    const int n = 1 + static_cast<int>(rng.below(10));
    const double R = rng.uniform(0.3, 3.0), rho = rng.uniform(0.05, 2.0);
    const std::size_t m = 1 + rng.below(5000);
    const std::uint64_t T = 2 + rng.below(10000000);
    const double delta = rng.uniform(0.001, 0.999);
    const BoundReport b = theorem_bound(n, m, T, R, rho, delta);
    const Oracle o = oracle_of(n, R, rho, m, T, delta);
    if (12.0 * R * static_cast<double>(o.c_theta) < kExpCeiling - 1.0) {
      REQUIRE(b.status == BoundStatus::ok);
      CHECK(rel_close(kappa(n, R, rho), o.kappa, 1e-9));
      CHECK(rel_close(c_theta(n, R, rho), o.c_theta, 1e-9));
      CHECK(rel_close(b.total, o.total, 1e-9));
      CHECK(rel_close(b.r, o.r, 1e-9));
    } else if (12.0 * R * static_cast<double>(o.c_theta) > kExpCeiling + 1.0) {
      CHECK(b.status == BoundStatus::vacuous);
      CHECK(std::isinf(b.total));
    }
  });
}

TEST_CASE("theorem bound decreases strictly in m and in T") {
  double prev = theorem_bound(2, 10, 1000, 2.0, 0.01, 0.1).total;
  for (std::size_t m : {20u, 50u, 100u, 1000u}) {
    const double cur = theorem_bound(2, m, 1000, 2.0, 0.01, 0.1).total;
    CHECK(cur < prev);
    prev = cur;
  }
  prev = theorem_bound(2, 50, 2, 2.0, 0.01, 0.1).total;
  for (std::uint64_t T : {10u, 1000u, 100000u, 10000000u}) {
    const double cur = theorem_bound(2, 50, T, 2.0, 0.01, 0.1).total;
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("overflowing exponents yield a vacuous bound, not a NaN") {
  const BoundReport b = theorem_bound(2, 50, 1000, 2.0, 10.0, 0.1);
  CHECK(b.status == BoundStatus::vacuous);
  CHECK(std::isinf(b.total));
  CHECK(std::isinf(b.beta1));
  CHECK(!std::isnan(b.approx_term));
  CHECK(!guarded_exp(kExpCeiling + 1.0).has_value());
  CHECK(guarded_exp(1.0).value() == std::exp(1.0));
}

TEST_CASE("theorem bound rejects invalid arguments") {
  CHECK_THROWS_AS(theorem_bound(2, 0, 10, 2.0, 1.0, 0.1), InvalidArgument);
  CHECK_THROWS_AS(theorem_bound(2, 10, 1, 2.0, 1.0, 0.1), InvalidArgument);
  CHECK_THROWS_AS(theorem_bound(2, 10, 10, 2.0, 1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(theorem_bound(2, 10, 10, 2.0, 1.0, 1.0), InvalidArgument);
}

TEST_CASE("optimizer constants satisfy their defining identities") {
  const ProblemConstants pc = ProblemConstants::make(2, 2.0, 1.0);
  const OptimizerConstants oc = optimizer_constants(pc, 50);
  const double x = pc.radius * pc.c_theta, sm = std::sqrt(50.0);
  CHECK(oc.status == BoundStatus::ok);
  CHECK(oc.d_theta == 2.0 * pc.c_theta / sm);
  CHECK(oc.d_z == std::exp(2.0 * x));
  CHECK(oc.l_z == 2.0 * pc.radius * sm * std::exp(2.0 * x));
  CHECK(oc.g == 2.0 * pc.radius * sm * (1.0 + std::exp(4.0 * x)));
  CHECK(oc.l_f == 2.0 * pc.radius * sm * std::exp(6.0 * x));
  CHECK(oc.nu * oc.nu == doctest::Approx(std::exp(4.0 * x)).epsilon(1e-14));
  CHECK(oc.z_lo == std::exp(-2.0 * x));
  CHECK(oc.z_hi == std::exp(2.0 * x));
}

TEST_CASE("schedules") {
  const ProblemConstants pc = ProblemConstants::make(2, 2.0, 1.0);
  const Schedule e = schedule(ScheduleKind::experiment, 1000000, 50, pc);
  CHECK(e.alpha == doctest::Approx(1e-4).epsilon(1e-12));
  CHECK(e.r == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(schedule(ScheduleKind::experiment, 8, 50, pc).alpha == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(schedule(ScheduleKind::theorem, 2, 50, pc).alpha == doctest::Approx(1.0).epsilon(1e-15));
  const Schedule t = schedule(ScheduleKind::theorem, 500000, 50, pc);
  const BoundReport b = theorem_bound(2, 50, 500000, 2.0, 1.0, 0.1);
  CHECK(t.alpha == b.alpha);
  CHECK(t.r == b.r);
  CHECK_THROWS_AS(schedule(ScheduleKind::theorem, 1, 50, pc), InvalidArgument);
  CHECK_THROWS_AS(schedule(ScheduleKind::theorem, 100, 50, ProblemConstants::make(2, 2.0, 10.0)), NumericalFailure);
  CHECK(parse_schedule_kind("theorem") == ScheduleKind::theorem);
  CHECK(parse_schedule_kind("experiment") == ScheduleKind::experiment);
  CHECK_THROWS_AS(parse_schedule_kind("fast"), InvalidArgument);
}

TEST_CASE("constants grid: shape, linearity and monotonicity") {
  std::vector<int> ns{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> rhos{0.1, 1.0, 10.0};
  const auto rows = constants_grid(ns, rhos, 2.0);
  REQUIRE(rows.size() == 30);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const auto* r = &rows[i * 3];
    CHECK(r[0].n == ns[i]);
    CHECK(r[1].kappa == doctest::Approx(10.0 * r[0].kappa).epsilon(1e-14));
    CHECK(r[2].kappa == doctest::Approx(10.0 * r[1].kappa).epsilon(1e-14));
    for (int j = 0; j < 2; ++j) {
      if (r[j + 1].status == BoundStatus::ok) {
        CHECK(r[j + 1].beta1 > r[j].beta1);
        CHECK(r[j + 1].beta2 > r[j].beta2);
      } else {
        CHECK(std::isinf(r[j + 1].beta1));
      }
    }
  }
  CHECK_THROWS_AS(constants_grid(std::vector<int>{}, rhos, 2.0), InvalidArgument);
}

TEST_CASE("the dimension factor decreases strictly from n = 2 on") {
  for (int n = 2; n < 20; ++n) {
    const Oracle a = oracle_of(n, 1.0, 1.0, 1, 2, 0.5), b = oracle_of(n + 1, 1.0, 1.0, 1, 2, 0.5);
    CHECK(b.factor < a.factor);
    CHECK(dimension_factor(n + 1) < dimension_factor(n));
    CHECK(rel_close(dimension_factor(n), a.factor, 1e-12));
  }
}
