#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "stlab/modmath.hpp"

namespace stlab {

using bigint = boost::multiprecision::cpp_int;

// Integral long Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6
// together with its conductor (taken as configured input, never recomputed).
struct RationalCurve {
  std::string label;
  bigint a1, a2, a3, a4, a6;
  std::uint64_t conductor = 0;
  std::uint32_t rank = 0;  // metadata only
};

inline bigint discriminant(const RationalCurve& c) {
  bigint b2 = c.a1 * c.a1 + 4 * c.a2;
  bigint b4 = 2 * c.a4 + c.a1 * c.a3;
  bigint b6 = c.a3 * c.a3 + 4 * c.a6;
  bigint b8 = c.a1 * c.a1 * c.a6 + 4 * c.a2 * c.a6 - c.a1 * c.a3 * c.a4 + c.a2 * c.a3 * c.a3 - c.a4 * c.a4;
  return -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
}

// The curve reduced mod p. For good p > 3 the model is brought to short form
// y^2 = x^3 + Ax + B (same point count as the long form); p in {2,3} keeps the
// long coefficients, which downstream counts by direct enumeration.
struct ReducedCurve {
  std::uint64_t p = 0;
  bool good = false;
  bool short_form = false;
  std::uint64_t a1 = 0, a2 = 0, a3 = 0, a4 = 0, a6 = 0;  // long form mod p
  std::uint64_t A = 0, B = 0;                            // short form mod p (p > 3)
};

namespace detail {

inline std::uint64_t mod_p(const bigint& v, std::uint64_t p) {
  bigint r = v % p;
  if (r < 0) r += p;
  return static_cast<std::uint64_t>(r);
}

// Discriminant of the reduced long model, computed mod p.
inline std::uint64_t discriminant_mod_p(const ReducedCurve& rc) {
  const std::uint64_t p = rc.p;
  auto mul = [p](std::uint64_t a, std::uint64_t b) { return mulmod(a, b, p); };
  std::uint64_t b2 = addmod(mul(rc.a1, rc.a1), mul(4 % p, rc.a2), p);
  std::uint64_t b4 = addmod(mul(2 % p, rc.a4), mul(rc.a1, rc.a3), p);
  std::uint64_t b6 = addmod(mul(rc.a3, rc.a3), mul(4 % p, rc.a6), p);
  std::uint64_t b8 = addmod(mul(mul(rc.a1, rc.a1), rc.a6), mul(mul(4 % p, rc.a2), rc.a6), p);
  b8 = submod(b8, mul(mul(rc.a1, rc.a3), rc.a4), p);
  b8 = addmod(b8, mul(rc.a2, mul(rc.a3, rc.a3)), p);
  b8 = submod(b8, mul(rc.a4, rc.a4), p);
  std::uint64_t d = submod(0, mul(mul(b2, b2), b8), p);
  d = submod(d, mul(8 % p, mul(b4, mul(b4, b4))), p);
  d = submod(d, mul(27 % p, mul(b6, b6)), p);
  d = addmod(d, mul(9 % p, mul(b2, mul(b4, b6))), p);
  return d;
}

}  // namespace detail

inline ReducedCurve reduce_mod_p(const RationalCurve& c, std::uint64_t p) {
  ReducedCurve rc;
  rc.p = p;
  rc.good = (c.conductor % p) != 0;
  rc.a1 = detail::mod_p(c.a1, p);
  rc.a2 = detail::mod_p(c.a2, p);
  rc.a3 = detail::mod_p(c.a3, p);
  rc.a4 = detail::mod_p(c.a4, p);
  rc.a6 = detail::mod_p(c.a6, p);
  if (!rc.good) return rc;

  if (detail::discriminant_mod_p(rc) == 0)
    throw std::invalid_argument("reduce_mod_p: model of " + c.label + " is singular mod " + std::to_string(p) +
                                " although p does not divide the conductor");

  if (p > 3) {
    // Complete the square and depress the cubic: y^2 = x^3 - 27 c4 x - 54 c6,
    // a quartic/sextic twist by squares, so the point count is unchanged.
    auto mul = [p](std::uint64_t a, std::uint64_t b) { return mulmod(a, b, p); };
    std::uint64_t b2 = addmod(mul(rc.a1, rc.a1), mul(4, rc.a2), p);
    std::uint64_t b4 = addmod(mul(2, rc.a4), mul(rc.a1, rc.a3), p);
    std::uint64_t b6 = addmod(mul(rc.a3, rc.a3), mul(4, rc.a6), p);
    std::uint64_t c4 = submod(mul(b2, b2), mul(24 % p, b4), p);
    std::uint64_t c6 = submod(mul(36 % p, mul(b2, b4)), addmod(mul(b2, mul(b2, b2)), mul(216 % p, b6), p), p);
    rc.A = submod(0, mul(27 % p, c4), p);
    rc.B = submod(0, mul(54 % p, c6), p);
    rc.short_form = true;
  }
  return rc;
}

}  // namespace stlab
