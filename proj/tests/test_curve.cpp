#include <catch2/catch_amalgamated.hpp>

#include "oracle_helpers.hpp"
#include "stlab/config.hpp"
#include "stlab/curve.hpp"
#include "stlab/trace.hpp"

using namespace stlab;

namespace {

// Independent route: 1728 * disc = c4^3 - c6^2.
bigint disc_via_c_invariants(const RationalCurve& c) {
  bigint b2 = c.a1 * c.a1 + 4 * c.a2;
  bigint b4 = 2 * c.a4 + c.a1 * c.a3;
  bigint b6 = c.a3 * c.a3 + 4 * c.a6;
  bigint c4 = b2 * b2 - 24 * b4;
  bigint c6 = -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6;
  bigint num = c4 * c4 * c4 - c6 * c6;
  REQUIRE(num % 1728 == 0);
  return num / 1728;
}

}  // namespace

TEST_CASE("discriminants of the stock curves", "[curve]") {
  auto curves = builtin_curves();
  REQUIRE(discriminant(curves[0]) == -11);
  REQUIRE(discriminant(curves[1]) == 37);
  for (const auto& c : curves) REQUIRE(discriminant(c) == disc_via_c_invariants(c));
  RationalCurve cusp{"cusp", 0, 0, 0, 0, 0, 1, 0};
  REQUIRE(discriminant(cusp) == 0);
}

TEST_CASE("discriminant two-route agreement on random models", "[curve]") {
  SplitMix64 rng(7);
  for (int t = 0; t < 200; ++t) {
    RationalCurve c;
    c.a1 = static_cast<std::int64_t>(rng.below(19)) - 9;
    c.a2 = static_cast<std::int64_t>(rng.below(19)) - 9;
    c.a3 = static_cast<std::int64_t>(rng.below(19)) - 9;
    c.a4 = static_cast<std::int64_t>(rng.below(199)) - 99;
    c.a6 = static_cast<std::int64_t>(rng.below(1999)) - 999;
    REQUIRE(discriminant(c) == disc_via_c_invariants(c));
  }
}

TEST_CASE("reduction flag follows the conductor", "[curve]") {
  auto curves = builtin_curves();
  const auto& e1 = curves[0];
  REQUIRE_FALSE(reduce_mod_p(e1, 11).good);
  auto r2 = reduce_mod_p(e1, 2);
  REQUIRE(r2.good);
  REQUIRE_FALSE(r2.short_form);  // long form retained at p = 2
  REQUIRE(r2.a2 == 1);           // -1 mod 2
  REQUIRE_FALSE(reduce_mod_p(curves[3], 5077).good);
  REQUIRE(reduce_mod_p(curves[3], 11).good);
}

TEST_CASE("good reduction by conductor but singular model is rejected", "[curve]") {
  RationalCurve wrong{"wrong-conductor", 0, -1, 1, 0, 0, 7, 0};  // model of E1, 11 not recorded
  REQUIRE_THROWS_AS(reduce_mod_p(wrong, 11), std::invalid_argument);
}

TEST_CASE("short form preserves the point count", "[curve]") {
  auto primes = oracles::sieve_upto(1000);
  for (const auto& c : builtin_curves()) {
    int checked = 0;
    for (auto p : primes) {
      if (p <= 3 || c.conductor % p == 0) continue;
      auto rc = reduce_mod_p(c, p);
      REQUIRE(rc.short_form);
      REQUIRE(count_points_naive(rc) == oracles::count_points_longform(c, p));
      ++checked;
    }
    REQUIRE(checked >= 160);
  }
}

TEST_CASE("primes dividing the conductor divide the discriminant", "[curve]") {
  for (const auto& c : builtin_curves()) {
    bigint d = discriminant(c);
    std::uint64_t n = c.conductor;
    for (std::uint64_t p = 2; p * p <= n; ++p) {
      while (n % p == 0) {
        REQUIRE(d % p == 0);
        n /= p;
      }
    }
    if (n > 1) REQUIRE(d % n == 0);
  }
}
