#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "generators.hpp"
#include "rfkl/error.hpp"
#include "rfkl/numeric.hpp"

using namespace rfkl;

TEST_CASE("pairwise_sum matches the exact sum of small integers") {
  std::vector<double> v;
  for (int i = 1; i <= 1000; ++i) v.push_back(i);
  CHECK(pairwise_sum(v) == 500500.0);
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("pairwise_sum keeps the error of a long sum small") {
  std::vector<double> v(1 << 20, 0.1);
  CHECK(std::abs(pairwise_sum(v) - 0.1 * (1 << 20)) < 1e-8);
}

TEST_CASE("log_sum_exp agrees with the direct formula where it does not overflow") {
  gen::for_all(200, 11, [](Rng& rng, std::size_t) {
    const auto v = gen::uniform_vector(rng, 1 + rng.below(50), -30.0, 30.0);
    double direct = 0.0;
    for (double x : v) direct += std::exp(x);
    CHECK(log_sum_exp(v) == doctest::Approx(std::log(direct)).epsilon(1e-12));
  });
}

TEST_CASE("log_sum_exp survives arguments whose exponentials overflow") {
  const std::vector<double> v{1000.0, 1000.0};
  CHECK(log_sum_exp(v) == doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-15));
  CHECK(log_mean_exp(v) == doctest::Approx(1000.0).epsilon(1e-15));
}

TEST_CASE("log_sum_exp rejects an empty input") {
  CHECK_THROWS_AS(log_sum_exp(std::vector<double>{}), EmptySampleSet);
}

TEST_CASE("normal quantile inverts the CDF") {
  for (double x : {-6.0, -2.0, -0.3, 0.0, 0.7, 2.0, 5.0}) {
    CHECK(normal_quantile(normal_cdf(x)) == doctest::Approx(x).epsilon(1e-9));
  }
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(2.0) == doctest::Approx(0.9772498680518208).epsilon(1e-15));
}

TEST_CASE("Gauss-Legendre with k nodes integrates degree 2k-1 polynomials exactly") {
  for (std::size_t k : {1u, 2u, 5u, 17u, 64u}) {
    const QuadratureRule r = gauss_legendre(k, -1.0, 3.0);
    const int deg = static_cast<int>(2 * k - 1);
    double s = 0.0;
    for (std::size_t i = 0; i < k; ++i) s += r.weights[i] * std::pow(r.nodes[i], deg);
    const double exact = (std::pow(3.0, deg + 1) - std::pow(-1.0, deg + 1)) / (deg + 1);
    CHECK(s == doctest::Approx(exact).epsilon(1e-12));
    double w = 0.0;
    for (double x : r.weights) w += x;
    CHECK(w == doctest::Approx(4.0).epsilon(1e-14));
  }
}

TEST_CASE("composite Gauss-Legendre covers the interval") {
  const QuadratureRule r = composite_gauss_legendre(10, 4, 0.0, std::numbers::pi);
  CHECK(r.nodes.size() == 40);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::sin(r.nodes[i]);
  CHECK(s == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("adaptive integration of smooth, kinked and infinite-range integrands") {
  CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0).value == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  const std::vector<double> kink{0.3};
  CHECK(integrate([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, kink).value ==
        doctest::Approx(0.045 + 0.245).epsilon(1e-13));
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(integrate([](double x) { return std::exp(-x * x); }, -inf, inf).value ==
        doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-10));
}

TEST_CASE("integration reports failure instead of a non-finite value") {
  CHECK_THROWS_AS(integrate([](double) { return std::nan(""); }, 0.0, 1.0), QuadratureFailure);
}
