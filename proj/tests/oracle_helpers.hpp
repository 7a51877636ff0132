#pragma once

// Test-only oracles, independent of the library implementations they check.

#include <cstdint>
#include <vector>

#include "stlab/curve.hpp"
#include "stlab/discrepancy.hpp"

namespace oracles {

// Plain Eratosthenes sieve up to limit.
inline std::vector<std::uint64_t> sieve_upto(std::uint64_t limit) {
  std::vector<bool> comp(limit + 1, false);
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (comp[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = i * i; j <= limit; j += i) comp[j] = true;
  }
  return out;
}

inline bool is_prime_trial_division(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// Exhaustive point count of the long Weierstrass model mod p, straight from
// the curve equation (no short-form transform, no finite differences).
inline std::uint64_t count_points_longform(const stlab::RationalCurve& c, std::uint64_t p) {
  auto red = [&](const stlab::bigint& v) {
    stlab::bigint r = v % p;
    if (r < 0) r += p;
    return static_cast<std::uint64_t>(r);
  };
  std::uint64_t a1 = red(c.a1), a2 = red(c.a2), a3 = red(c.a3), a4 = red(c.a4), a6 = red(c.a6);
  std::uint64_t n = 1;
  for (std::uint64_t x = 0; x < p; ++x) {
    std::uint64_t rhs = (((x * x % p * x) % p + a2 * x % p * x) % p + a4 * x % p + a6) % p;
    for (std::uint64_t y = 0; y < p; ++y)
      if ((y * y % p + a1 * x % p * y % p + a3 * y) % p == rhs) ++n;
  }
  return n;
}

// True supremum of |A(R_W)/K - mu(R_W)| over W in [0,1]^s: every grid corner
// with every combination of per-coordinate one-sided limits, counts taken by
// direct point loops.
inline double star_supremum(const stlab::WindowPointSet& ps) {
  stlab::CoordinateGrid g = stlab::CoordinateGrid::build(ps);
  const std::size_t s = ps.s;
  std::size_t n[3] = {1, 1, 1};
  for (std::size_t i = 0; i < s; ++i) n[i] = g.values[i].size();

  double best = 0.0;
  std::size_t J[3] = {1, 1, 1};
  for (;;) {
    double mu = 1.0;
    for (std::size_t i = 0; i < s; ++i) mu *= g.cdf[i][J[i] - 1];
    for (std::size_t mask = 0; mask < (std::size_t(1) << s); ++mask) {
      bool legal = true;
      for (std::size_t i = 0; i < s && legal; ++i)
        if (((mask >> i) & 1) && g.values[i][J[i] - 1] >= 1.0) legal = false;  // cannot pass 1
      if (!legal) continue;
      std::size_t cnt = 0;
      for (std::size_t k = 0; k < ps.K; ++k) {
        bool in = true;
        for (std::size_t i = 0; i < s && in; ++i) {
          double x = ps.at(k, i), w = g.values[i][J[i] - 1];
          in = ((mask >> i) & 1) ? x <= w : x < w;
        }
        cnt += in;
      }
      double dev = std::abs(static_cast<double>(cnt) / static_cast<double>(ps.K) - mu);
      if (dev > best) best = dev;
    }
    std::size_t i = 0;
    for (; i < s; ++i) {
      if (J[i] < n[i]) {
        ++J[i];
        break;
      }
      J[i] = 1;
    }
    if (i == s) break;
  }
  return best;
}

inline stlab::WindowPointSet random_point_set(stlab::SplitMix64& rng, std::size_t s, std::size_t K,
                                              bool with_ties = false) {
  std::vector<double> flat(s * K);
  for (auto& v : flat) v = with_ties && rng.below(10) < 3 ? 0.5 : rng.uniform01();
  return stlab::WindowPointSet::from_points(s, flat);
}

}  // namespace oracles
