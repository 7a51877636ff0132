#include <catch2/catch_amalgamated.hpp>

#include "stlab/st_measure.hpp"

using namespace stlab;

namespace {

// Independent quadrature route: composite Simpson with many panels.
double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("st_cdf anchors", "[st_measure]") {
  REQUIRE(st_cdf(0.0) == 0.0);
  REQUIRE(st_cdf(1.0) == Catch::Approx(1.0).margin(1e-15));
  REQUIRE(st_cdf(0.5) == Catch::Approx(0.5).margin(1e-15));
  double expect = 0.25 - 1.0 / (2.0 * kPi);
  REQUIRE(st_cdf(0.25) == Catch::Approx(expect).margin(1e-15));
  REQUIRE(st_cdf(0.25) == Catch::Approx(simpson(st_density, 0.0, 0.25)).margin(1e-12));
  REQUIRE_THROWS_AS(st_cdf(-0.1), std::domain_error);
  REQUIRE_THROWS_AS(st_cdf(1.1), std::domain_error);
}

TEST_CASE("st_cdf is strictly increasing on a fine grid", "[st_measure]") {
  double prev = st_cdf(0.0);
  for (int i = 1; i <= 10000; ++i) {
    double cur = st_cdf(i / 10000.0);
    REQUIRE(cur > prev);
    prev = cur;
  }
}

TEST_CASE("product_cdf", "[st_measure]") {
  REQUIRE(product_cdf({1.0, 1.0, 1.0}) == Catch::Approx(1.0).margin(1e-15));
  REQUIRE(product_cdf({0.5, 0.5}) == Catch::Approx(0.25).margin(1e-15));
  REQUIRE(product_cdf({0.25, 0.5}) == Catch::Approx(st_cdf(0.25) * 0.5).margin(1e-16));
  REQUIRE_THROWS_AS(product_cdf({0.5, 1.5}), std::domain_error);
}

TEST_CASE("quadrature of the density is a probability measure", "[st_measure]") {
  REQUIRE(quad_factor_integral([](double) { return 1.0; }) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("closed forms match quadrature", "[st_measure]") {
  REQUIRE(g_factor_integral(1) == Catch::Approx(0.6165043219240669).margin(1e-12));
  REQUIRE(quad_factor_integral([](double u) { return std::exp(-u); }) ==
          Catch::Approx(g_factor_integral(1)).margin(1e-9));
  REQUIRE(h_factor_integral(1) == Catch::Approx((2.0 / kPi) * (16.0 / 15.0)).margin(1e-15));
  for (std::uint64_t i = 1; i <= 2000; ++i) {
    double x = static_cast<double>(i);
    REQUIRE(g_factor_integral(i) ==
            Catch::Approx(quad_factor_integral([x](double u) { return std::exp(-u / x); })).margin(1e-9));
    REQUIRE(h_factor_integral(i) ==
            Catch::Approx(quad_factor_integral(
                              [x](double u) { return std::cos(kPi * u / (2.0 * std::sqrt(x))); }))
                .margin(1e-9));
  }
}

TEST_CASE("quadrature reports non-convergence at depth limit", "[st_measure]") {
  REQUIRE_THROWS_WITH(integrate([](double u) { return std::sin(500.0 * u * u); }, 0.0, 1.0, 1e-14, 2),
                      Catch::Matchers::ContainsSubstring("converge"));
  REQUIRE_THROWS_AS(quad_factor_integral([](double) { return 1.0; }, 0.0), std::invalid_argument);
}

TEST_CASE("builtin test functions", "[st_measure]") {
  auto f10 = builtin_test_function("f10", 10);
  REQUIRE(f10.s == 10);
  REQUIRE(f10.scale == 1.0);
  REQUIRE(f10.reference_integral() == Catch::Approx(114.076).margin(5e-4));

  auto g1000 = builtin_test_function("g", 1000);
  REQUIRE(g1000.reference_integral() == Catch::Approx(2.43333).margin(5e-6));
  REQUIRE(builtin_test_function("h", 1000).reference_integral() == Catch::Approx(6.92239).margin(5e-6));
  REQUIRE(builtin_test_function("h", 2000).reference_integral() == Catch::Approx(5.43635).margin(5e-6));

  REQUIRE_THROWS_AS(builtin_test_function("q", 5), std::invalid_argument);
  REQUIRE_THROWS_AS(builtin_test_function("f10", 7), std::invalid_argument);
  REQUIRE_THROWS_AS(builtin_test_function("g", 0), std::invalid_argument);
}

TEST_CASE("factor evaluation kinds", "[st_measure]") {
  REQUIRE(Factor::log_shift(2.0)(0.5) == Catch::Approx(std::log(2.5)));
  REQUIRE(Factor::pow_shift(4.0, 1.0 / 3.0)(0.5) == Catch::Approx(std::cbrt(4.5)));
  REQUIRE(Factor::exp_neg_scale(0.5)(1.0) == Catch::Approx(std::exp(-0.5)));
  REQUIRE(Factor::exp_sqrt_shift(1.0)(0.44) == Catch::Approx(std::exp(1.2)));
  REQUIRE(Factor::cos_scale(kPi / 2)(1.0) == Catch::Approx(0.0).margin(1e-15));
  REQUIRE(Factor::custom([](double u) { return 3.0 * u; })(0.25) == Catch::Approx(0.75));
  REQUIRE(Factor::constant(7.0)(0.9) == 7.0);
}
