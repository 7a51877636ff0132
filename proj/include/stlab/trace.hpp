#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "stlab/curve.hpp"
#include "stlab/errors.hpp"
#include "stlab/modmath.hpp"

namespace stlab {

struct TraceRecord {
  std::uint64_t k = 0;  // 1-based prime index
  std::uint64_t p = 0;
  std::int64_t a = 0;  // trace of Frobenius, meaningful only when good
  bool good = false;
};

struct TraceOptions {
  std::uint64_t naive_threshold = 4096;
  std::uint64_t charsum_threshold = 100000;
  std::uint64_t bsgs_min_prime = 457;  // Mestre's bound; bsgs refuses p <= this
};

// ---------------------------------------------------------------------------
// Backend 1: exhaustive enumeration of all (x, y) in F_p^2.
// ---------------------------------------------------------------------------

inline std::uint64_t count_points_naive(const ReducedCurve& rc, std::uint64_t threshold = 4096) {
  if (!rc.good) throw std::invalid_argument("count_points_naive: curve has bad reduction at p");
  const std::uint64_t p = rc.p;
  if (p > threshold && p > 3)
    throw resource_limit_error("count_points_naive: p = " + std::to_string(p) + " exceeds threshold " +
                               std::to_string(threshold));

  // Cubic right-hand side swept by finite differences; the inner loop walks y
  // with additive updates only, so each probe is a compare plus a few adds.
  const std::uint64_t a2 = rc.short_form ? 0 : rc.a2;
  const std::uint64_t a4 = rc.short_form ? rc.A : rc.a4;
  const std::uint64_t a6 = rc.short_form ? rc.B : rc.a6;
  const std::uint64_t a1 = rc.short_form ? 0 : rc.a1;
  const std::uint64_t a3 = rc.short_form ? 0 : rc.a3;

  std::uint64_t count = 1;  // point at infinity
  std::uint64_t f = a6 % p;
  std::uint64_t d1 = (1 + a2 % p + a4 % p) % p;
  std::uint64_t d2 = (6 + 2 * (a2 % p)) % p;
  const std::uint64_t d3 = 6 % p;
  std::uint64_t g = a3 % p;  // a1*x + a3
  const std::uint64_t dg = a1 % p;
  for (std::uint64_t x = 0; x < p; ++x) {
    // inner: val = y^2 + g*y, stepping val by (2y + 1 + g)
    std::uint64_t val = 0;
    std::uint64_t step = (1 + g) % p;
    for (std::uint64_t y = 0; y < p; ++y) {
      if (val == f) ++count;
      val += step;
      if (val >= p) val -= p;
      step += 2;
      if (step >= p) step -= p;
    }
    f += d1;
    if (f >= p) f -= p;
    d1 += d2;
    if (d1 >= p) d1 -= p;
    d2 += d3;
    if (d2 >= p) d2 -= p;
    g += dg;
    if (g >= p) g -= p;
  }
  return count;
}

// ---------------------------------------------------------------------------
// Backend 2: quadratic-character sum #E = p + 1 + sum_x chi(x^3 + Ax + B).
// ---------------------------------------------------------------------------

inline std::uint64_t count_points_charsum(const ReducedCurve& rc) {
  if (!rc.good) throw std::invalid_argument("count_points_charsum: curve has bad reduction at p");
  if (!rc.short_form) throw std::invalid_argument("count_points_charsum: requires short form (p > 3)");
  const std::uint64_t p = rc.p;

  std::vector<std::uint8_t> qr(p, 0);
  std::uint64_t yy = 0;
  for (std::uint64_t y = 1; y <= (p - 1) / 2; ++y) {
    yy += 2 * y - 1;  // y^2 - (y-1)^2, stays below 2p
    if (yy >= p) yy -= p;
    qr[yy] = 1;
  }

  std::int64_t acc = 0;
  std::uint64_t f = rc.B % p;
  std::uint64_t d1 = (1 + rc.A % p) % p;
  std::uint64_t d2 = 6 % p;
  for (std::uint64_t x = 0; x < p; ++x) {
    if (f != 0) acc += qr[f] ? 1 : -1;
    f += d1;
    if (f >= p) f -= p;
    d1 += d2;
    if (d1 >= p) d1 -= p;
    d2 += 6;
    if (d2 >= p) d2 -= p;
  }
  return static_cast<std::uint64_t>(static_cast<std::int64_t>(p + 1) + acc);
}

// ---------------------------------------------------------------------------
// Backend 3: baby-step/giant-step order search in the Hasse interval, with
// Mestre-style disambiguation through extra points and the quadratic twist.
// ---------------------------------------------------------------------------

namespace detail {

struct EcContext {
  Montgomery64 mont;
  std::uint64_t A, B;  // Montgomery domain
  EcContext(std::uint64_t p, std::uint64_t a_plain, std::uint64_t b_plain)
      : mont(p), A(mont.to(a_plain)), B(mont.to(b_plain)) {}
};

struct JacPoint {
  std::uint64_t X = 0, Y = 0, Z = 0;  // Z == 0 encodes infinity
};

struct AffPoint {
  std::uint64_t x = 0, y = 0;  // Montgomery domain
  bool inf = false;
};

inline JacPoint jac_dbl(const EcContext& c, const JacPoint& q) {
  const auto& m = c.mont;
  if (q.Z == 0 || q.Y == 0) return {};
  std::uint64_t yy = m.mul(q.Y, q.Y);
  std::uint64_t yyyy = m.mul(yy, yy);
  std::uint64_t s = m.mul(q.X, yy);
  s = m.add(s, s);
  s = m.add(s, s);  // 4XY^2
  std::uint64_t zz = m.mul(q.Z, q.Z);
  std::uint64_t xx = m.mul(q.X, q.X);
  std::uint64_t mm = m.add(m.add(xx, m.add(xx, xx)), m.mul(c.A, m.mul(zz, zz)));
  JacPoint r;
  r.X = m.sub(m.mul(mm, mm), m.add(s, s));
  std::uint64_t e8 = m.add(yyyy, yyyy);
  e8 = m.add(e8, e8);
  e8 = m.add(e8, e8);  // 8Y^4
  r.Y = m.sub(m.mul(mm, m.sub(s, r.X)), e8);
  r.Z = m.mul(m.add(q.Y, q.Y), q.Z);
  return r;
}

inline JacPoint jac_add_affine(const EcContext& c, const JacPoint& q, const AffPoint& p) {
  const auto& m = c.mont;
  if (p.inf) return q;
  if (q.Z == 0) return {p.x, p.y, m.one};
  std::uint64_t zz = m.mul(q.Z, q.Z);
  std::uint64_t u2 = m.mul(p.x, zz);
  std::uint64_t s2 = m.mul(p.y, m.mul(zz, q.Z));
  std::uint64_t h = m.sub(u2, q.X);
  std::uint64_t r = m.sub(s2, q.Y);
  if (h == 0) {
    if (r == 0) return jac_dbl(c, q);
    return {};
  }
  std::uint64_t hh = m.mul(h, h);
  std::uint64_t hhh = m.mul(h, hh);
  std::uint64_t v = m.mul(q.X, hh);
  JacPoint out;
  out.X = m.sub(m.sub(m.mul(r, r), hhh), m.add(v, v));
  out.Y = m.sub(m.mul(r, m.sub(v, out.X)), m.mul(q.Y, hhh));
  out.Z = m.mul(q.Z, h);
  return out;
}

inline JacPoint jac_scalar_mul(const EcContext& c, const AffPoint& p, std::uint64_t n) {
  JacPoint acc;
  if (n == 0 || p.inf) return acc;
  int top = 63;
  while (top > 0 && !((n >> top) & 1)) --top;
  for (int b = top; b >= 0; --b) {
    acc = jac_dbl(c, acc);
    if ((n >> b) & 1) acc = jac_add_affine(c, acc, p);
  }
  return acc;
}

inline void normalize_batch(const EcContext& c, const std::vector<JacPoint>& in, std::vector<AffPoint>& out) {
  const auto& m = c.mont;
  const std::size_t n = in.size();
  out.assign(n, AffPoint{});
  if (n == 0) return;
  std::vector<std::uint64_t> prefix(n);
  std::uint64_t run = m.one;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t z = in[i].Z == 0 ? m.one : in[i].Z;
    run = m.mul(run, z);
    prefix[i] = run;
  }
  std::uint64_t tinv = m.inv(run);
  for (std::size_t i = n; i-- > 0;) {
    std::uint64_t z = in[i].Z == 0 ? m.one : in[i].Z;
    std::uint64_t zinv = m.mul(tinv, i == 0 ? m.one : prefix[i - 1]);
    tinv = m.mul(tinv, z);
    if (in[i].Z == 0) {
      out[i].inf = true;
      continue;
    }
    std::uint64_t zi2 = m.mul(zinv, zinv);
    out[i].x = m.mul(in[i].X, zi2);
    out[i].y = m.mul(in[i].Y, m.mul(zi2, zinv));
  }
}

// Open-addressing hash map from baby-step x-coordinates to step indices.
struct BabyIndex {
  std::vector<std::uint64_t> key;
  std::vector<std::uint32_t> val;
  std::vector<std::uint8_t> used;
  std::uint64_t mask = 0;

  void reset(std::size_t entries) {
    std::size_t cap = 16;
    while (cap < entries * 2) cap <<= 1;
    key.assign(cap, 0);
    val.assign(cap, 0);
    used.assign(cap, 0);
    mask = cap - 1;
  }
  void insert(std::uint64_t x, std::uint32_t j) {
    std::uint64_t h = mix64(x) & mask;
    while (used[h]) h = (h + 1) & mask;
    used[h] = 1;
    key[h] = x;
    val[h] = j;
  }
  template <typename Fn>
  void for_each(std::uint64_t x, Fn&& fn) const {
    std::uint64_t h = mix64(x) & mask;
    while (used[h]) {
      if (key[h] == x) fn(val[h]);
      h = (h + 1) & mask;
    }
  }
};

// All n in [lo, hi] with n*P = O, by meet-in-the-middle over the interval.
inline std::vector<std::uint64_t> multiples_in_interval(const EcContext& c, const AffPoint& p0, std::uint64_t lo,
                                                        std::uint64_t hi) {
  const auto& m = c.mont;
  const std::uint64_t width = hi - lo + 1;
  const std::uint64_t mstep = isqrt64(width) + 1;

  // Baby chain j*P for j = 1..mstep.
  std::vector<JacPoint> chain(mstep);
  chain[0] = {p0.x, p0.y, m.one};
  for (std::uint64_t j = 1; j < mstep; ++j) chain[j] = jac_add_affine(c, chain[j - 1], p0);
  std::vector<AffPoint> baby;
  normalize_batch(c, chain, baby);

  BabyIndex index;
  index.reset(mstep);
  std::vector<std::uint64_t> zero_js;  // j with j*P = O
  for (std::uint64_t j = 1; j <= mstep; ++j) {
    const AffPoint& b = baby[j - 1];
    if (b.inf)
      zero_js.push_back(j);
    else if (j < mstep)
      index.insert(b.x, static_cast<std::uint32_t>(j));
  }

  const AffPoint stride = baby[mstep - 1];  // mstep * P, possibly infinity
  const std::uint64_t kmax = (width - 1) / mstep;

  // Giant chain T_q = lo*P + q*(mstep*P).
  std::vector<JacPoint> giants(kmax + 1);
  giants[0] = jac_scalar_mul(c, p0, lo);
  for (std::uint64_t q = 1; q <= kmax; ++q) giants[q] = jac_add_affine(c, giants[q - 1], stride);
  std::vector<AffPoint> gaff;
  normalize_batch(c, giants, gaff);

  std::vector<std::uint64_t> hits;
  auto push = [&](std::uint64_t n) {
    if (n >= lo && n <= hi) hits.push_back(n);
  };
  for (std::uint64_t q = 0; q <= kmax; ++q) {
    const AffPoint& t = gaff[q];
    const std::uint64_t base = lo + q * mstep;
    if (t.inf) {
      push(base);
      for (std::uint64_t j : zero_js)
        if (j < mstep) push(base + j);
      continue;
    }
    index.for_each(t.x, [&](std::uint32_t j) {
      const AffPoint& b = baby[j - 1];
      if (t.y == m.neg(b.y)) push(base + j);          // T_q = -jP
      if (t.y == b.y && base >= j) push(base - j);    // T_q = +jP
    });
  }
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  return hits;
}

// Random affine point on y^2 = x^3 + Ax + B (plain-domain coefficients).
inline AffPoint random_point(const EcContext& c, std::uint64_t a_plain, std::uint64_t b_plain, SplitMix64& rng) {
  const std::uint64_t p = c.mont.n;
  for (;;) {
    std::uint64_t x = rng.below(p);
    std::uint64_t rhs = addmod(mulmod(x, mulmod(x, x, p), p), addmod(mulmod(a_plain, x, p), b_plain, p), p);
    if (rhs == 0) return {c.mont.to(x), 0, false};  // two-torsion point
    if (legendre(rhs, p) != 1) continue;
    std::uint64_t y = sqrtmod(rhs, p);
    return {c.mont.to(x), c.mont.to(y), false};
  }
}

}  // namespace detail

inline std::uint64_t count_points_bsgs(const ReducedCurve& rc, std::uint64_t seed = 0,
                                       std::uint64_t min_prime = 457) {
  if (!rc.good) throw std::invalid_argument("count_points_bsgs: curve has bad reduction at p");
  if (!rc.short_form || rc.p <= min_prime)
    throw std::invalid_argument("count_points_bsgs: requires short form and p > " + std::to_string(min_prime));
  const std::uint64_t p = rc.p;
  if (seed == 0) seed = mix64(p) ^ mix64(rc.A + 0x9e37u) ^ mix64(rc.B + 0x79b9u);
  SplitMix64 rng(seed);

  const std::uint64_t h = isqrt64(4 * p);
  const std::uint64_t lo = p + 1 - h, hi = p + 1 + h;

  detail::EcContext main_ctx(p, rc.A, rc.B);
  // Quadratic twist by the least non-residue d: y^2 = x^3 + A d^2 x + B d^3.
  std::uint64_t d = 2;
  while (legendre(d, p) != -1) ++d;
  const std::uint64_t d2 = mulmod(d, d, p);
  const std::uint64_t tw_a = mulmod(rc.A, d2, p);
  const std::uint64_t tw_b = mulmod(rc.B, mulmod(d2, d, p), p);
  detail::EcContext twist_ctx(p, tw_a, tw_b);

  std::vector<std::uint64_t> candidates;
  bool first = true;
  const int max_rounds = 64;
  for (int round = 0; round < max_rounds; ++round) {
    const bool use_twist = (round & 1) != 0;
    std::vector<std::uint64_t> found;
    if (!use_twist) {
      auto pt = detail::random_point(main_ctx, rc.A, rc.B, rng);
      found = detail::multiples_in_interval(main_ctx, pt, lo, hi);
    } else {
      auto pt = detail::random_point(twist_ctx, tw_a, tw_b, rng);
      // #E' = 2p + 2 - #E, so admissible orders mirror through 2p + 2.
      auto tw = detail::multiples_in_interval(twist_ctx, pt, 2 * p + 2 - hi, 2 * p + 2 - lo);
      found.reserve(tw.size());
      for (auto it = tw.rbegin(); it != tw.rend(); ++it) found.push_back(2 * p + 2 - *it);
    }
    if (first) {
      candidates = std::move(found);
      first = false;
    } else {
      std::vector<std::uint64_t> merged;
      std::set_intersection(candidates.begin(), candidates.end(), found.begin(), found.end(),
                            std::back_inserter(merged));
      candidates = std::move(merged);
    }
    if (candidates.size() == 1) return candidates.front();
    if (candidates.empty())
      throw internal_error("count_points_bsgs: no group order candidate survives at p = " + std::to_string(p));
  }
  throw internal_error("count_points_bsgs: ambiguous group order at p = " + std::to_string(p) + " (" +
                       std::to_string(candidates.size()) + " candidates)");
}

// ---------------------------------------------------------------------------
// Dispatcher: a_p = p + 1 - #E(F_p) through the size-appropriate backend.
// ---------------------------------------------------------------------------

inline TraceRecord trace(const RationalCurve& curve, std::uint64_t k, std::uint64_t p,
                         const TraceOptions& opts = {}) {
  TraceRecord rec;
  rec.k = k;
  rec.p = p;
  ReducedCurve rc = reduce_mod_p(curve, p);
  rec.good = rc.good;
  if (!rc.good) return rec;

  std::uint64_t n;
  if (p <= 3 || p <= opts.naive_threshold)
    n = count_points_naive(rc, std::max<std::uint64_t>(opts.naive_threshold, 3));
  else if (p <= opts.charsum_threshold)
    n = count_points_charsum(rc);
  else
    n = count_points_bsgs(rc, mix64(std::hash<std::string>{}(curve.label)) ^ mix64(p), opts.bsgs_min_prime);

  rec.a = static_cast<std::int64_t>(p + 1) - static_cast<std::int64_t>(n);
  // Hasse bound, asserted in production: a^2 <= 4p.
  if (rec.a * rec.a > static_cast<std::int64_t>(4 * p))
    throw internal_error("trace: Hasse bound violated for " + curve.label + " at p = " + std::to_string(p));
  return rec;
}

}  // namespace stlab
