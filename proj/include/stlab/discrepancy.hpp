#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "stlab/angles.hpp"
#include "stlab/errors.hpp"
#include "stlab/modmath.hpp"
#include "stlab/st_measure.hpp"

namespace stlab {

// K points in [0,1]^s, stored row-major. When built from an angle sequence the
// rows are the sliding windows X_k = (x_k, ..., x_{k+s-1}).
struct WindowPointSet {
  std::size_t s = 0;
  std::size_t K = 0;
  std::vector<double> coords;  // K * s

  double at(std::size_t k, std::size_t i) const { return coords[k * s + i]; }

  static WindowPointSet from_sequence(const AngleSequence& seq, std::size_t s, std::size_t K) {
    if (s < 1 || K < 1) throw std::invalid_argument("WindowPointSet: s and K must be >= 1");
    if (seq.length() < K + s - 1)
      throw std::length_error("WindowPointSet: sequence too short (need K + s - 1 angles)");
    WindowPointSet ps;
    ps.s = s;
    ps.K = K;
    ps.coords.resize(K * s);
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t i = 0; i < s; ++i) ps.coords[k * s + i] = seq.angles[k + i];
    return ps;
  }

  static WindowPointSet from_points(std::size_t s, const std::vector<double>& flat) {
    if (s < 1 || flat.size() % s != 0 || flat.empty())
      throw std::invalid_argument("WindowPointSet: flat size must be a positive multiple of s");
    WindowPointSet ps;
    ps.s = s;
    ps.K = flat.size() / s;
    ps.coords = flat;
    return ps;
  }
};

// Per-dimension sorted distinct coordinate values, with 0 and 1 included, plus
// memoized Sato-Tate CDF values on the grid. Repeated coordinates (the 1/2
// column of bad primes, supersingular a = 0) collapse into single grid values;
// their multiplicity lives in the counts.
struct CoordinateGrid {
  std::vector<std::vector<double>> values;  // values[i][r-1] is the r-th grid value
  std::vector<std::vector<double>> cdf;     // st_cdf of each grid value

  static CoordinateGrid build(const WindowPointSet& ps) {
    CoordinateGrid g;
    g.values.resize(ps.s);
    g.cdf.resize(ps.s);
    for (std::size_t i = 0; i < ps.s; ++i) {
      auto& v = g.values[i];
      v.reserve(ps.K + 2);
      for (std::size_t k = 0; k < ps.K; ++k) {
        double x = ps.at(k, i);
        if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("CoordinateGrid: coordinate outside [0,1]");
        v.push_back(x);
      }
      v.push_back(0.0);
      v.push_back(1.0);
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
      auto& f = g.cdf[i];
      f.resize(v.size());
      for (std::size_t r = 0; r < v.size(); ++r) f[r] = st_cdf(v[r]);
    }
    return g;
  }

  // 1-based rank of an exact grid value.
  std::size_t rank(std::size_t dim, double x) const {
    const auto& v = values[dim];
    auto it = std::lower_bound(v.begin(), v.end(), x);
    return static_cast<std::size_t>(it - v.begin()) + 1;
  }
};

// A(R_W; K): points with every coordinate strictly below W.
inline std::size_t box_count(const WindowPointSet& ps, const std::vector<double>& W) {
  if (W.size() != ps.s) throw std::invalid_argument("box_count: W has wrong dimension");
  std::size_t n = 0;
  for (std::size_t k = 0; k < ps.K; ++k) {
    bool in = true;
    for (std::size_t i = 0; i < ps.s && in; ++i) in = ps.at(k, i) < W[i];
    n += in;
  }
  return n;
}

struct DiscrepancyOptions {
  std::uint64_t budget_s1 = 10000000;
  std::uint64_t budget_s2 = 100000;
  std::uint64_t budget_s3 = 5000;
};

struct DiscrepancyResult {
  std::size_t s = 0;
  std::size_t K = 0;
  double star_disc = 0.0;
  double log_slope = 0.0;  // -ln(D*) / ln(K)
  std::vector<std::size_t> grid_sizes;
  double elapsed_seconds = 0.0;
};

// The star discrepancy statistic evaluated here is the grid-corner formula
// with half-open box counts throughout: the max over all grid corners W of
// |A(R_W)/K - mu(R_W)|, where A counts strictly and W ranges over the full
// coordinate grid. Cell upper and lower endpoints both appear as corners, so
// this is the Y(Q)/Z(Q) maximum over the cell partition.

namespace detail {

inline double star_disc_1d(const WindowPointSet& ps, const CoordinateGrid& g) {
  const auto& F = g.cdf[0];
  const std::size_t n = g.values[0].size();
  std::vector<std::uint32_t> mult(n + 1, 0);
  for (std::size_t k = 0; k < ps.K; ++k) ++mult[g.rank(0, ps.at(k, 0))];
  const double inv_k = 1.0 / static_cast<double>(ps.K);
  double best = 0.0;
  std::uint64_t below = 0;  // strict count: points with rank < j
  for (std::size_t j = 1; j <= n; ++j) {
    best = std::max(best, std::abs(static_cast<double>(below) * inv_k - F[j - 1]));
    below += mult[j];
  }
  return best;
}

// Shared CSR bucketing of points by dim-1 rank.
struct SweepBuckets {
  std::vector<std::uint32_t> offsets;             // per dim-1 rank
  std::vector<std::uint32_t> r2_of, r3_of;        // companion ranks in bucket order

  static SweepBuckets build(const WindowPointSet& ps, const CoordinateGrid& g) {
    SweepBuckets sb;
    const std::size_t n1 = g.values[0].size();
    sb.offsets.assign(n1 + 2, 0);
    std::vector<std::uint32_t> r1_of(ps.K);
    for (std::size_t k = 0; k < ps.K; ++k) {
      r1_of[k] = static_cast<std::uint32_t>(g.rank(0, ps.at(k, 0)));
      ++sb.offsets[r1_of[k] + 1];
    }
    for (std::size_t j = 1; j < sb.offsets.size(); ++j) sb.offsets[j] += sb.offsets[j - 1];
    std::vector<std::uint32_t> cursor(sb.offsets.begin(), sb.offsets.end());
    std::vector<std::uint32_t> order(ps.K);
    for (std::size_t k = 0; k < ps.K; ++k) order[cursor[r1_of[k]]++] = static_cast<std::uint32_t>(k);
    sb.r2_of.resize(ps.K);
    for (std::size_t idx = 0; idx < ps.K; ++idx)
      sb.r2_of[idx] = static_cast<std::uint32_t>(g.rank(1, ps.at(order[idx], 1)));
    if (ps.s >= 3) {
      sb.r3_of.resize(ps.K);
      for (std::size_t idx = 0; idx < ps.K; ++idx)
        sb.r3_of[idx] = static_cast<std::uint32_t>(g.rank(2, ps.at(order[idx], 2)));
    }
    return sb;
  }
};

// Sweep dim 1, maintaining counts over dim-2 ranks with running prefix sums.
inline double star_disc_2d(const WindowPointSet& ps, const CoordinateGrid& g) {
  const std::size_t n1 = g.values[0].size(), n2 = g.values[1].size();
  const auto& F1 = g.cdf[0];
  const auto& F2 = g.cdf[1];
  SweepBuckets sb = SweepBuckets::build(ps, g);

  std::vector<std::uint32_t> cnt2(n2 + 1, 0);  // counts by dim-2 rank, dim-1 ranks <= j1
  const double inv_k = 1.0 / static_cast<double>(ps.K);
  double best = 0.0;
  for (std::size_t j1 = 1; j1 + 1 <= n1; ++j1) {
    for (std::uint32_t idx = sb.offsets[j1]; idx < sb.offsets[j1 + 1]; ++idx) ++cnt2[sb.r2_of[idx]];
    const double f1 = F1[j1];  // F at corner index j1 + 1
    std::uint64_t run = 0;
    for (std::size_t j2 = 1; j2 + 1 <= n2; ++j2) {
      run += cnt2[j2];
      const double dev = std::abs(static_cast<double>(run) * inv_k - f1 * F2[j2]);
      if (dev > best) best = dev;
    }
  }
  return best;
}

// Sweep dim 1 with a 2-D rank histogram over dims 2-3; 2-D prefix sums are
// recomputed on every sweep step (the O(K^3) core).
inline double star_disc_3d(const WindowPointSet& ps, const CoordinateGrid& g) {
  const std::size_t n1 = g.values[0].size(), n2 = g.values[1].size(), n3 = g.values[2].size();
  const auto& F1 = g.cdf[0];
  const auto& F2 = g.cdf[1];
  const auto& F3 = g.cdf[2];
  SweepBuckets sb = SweepBuckets::build(ps, g);

  std::vector<std::uint32_t> hist((n2 + 1) * (n3 + 1), 0);
  std::vector<std::uint32_t> acc(n3 + 1, 0);
  const double inv_k = 1.0 / static_cast<double>(ps.K);
  double best = 0.0;
  for (std::size_t j1 = 1; j1 + 1 <= n1; ++j1) {
    for (std::uint32_t idx = sb.offsets[j1]; idx < sb.offsets[j1 + 1]; ++idx)
      ++hist[sb.r2_of[idx] * (n3 + 1) + sb.r3_of[idx]];
    const double f1 = F1[j1];
    std::fill(acc.begin(), acc.end(), 0);
    for (std::size_t j2 = 1; j2 + 1 <= n2; ++j2) {
      const std::uint32_t* row = hist.data() + j2 * (n3 + 1);
      const double c12 = f1 * F2[j2];
      std::uint32_t run = 0;
      std::uint32_t* accp = acc.data();
      const double* f3 = F3.data();
      double local = best;
      for (std::size_t j3 = 1; j3 + 1 <= n3; ++j3) {
        run += row[j3];
        accp[j3] += run;
        const double dev = std::abs(static_cast<double>(accp[j3]) * inv_k - c12 * f3[j3]);
        if (dev > local) local = dev;
      }
      best = local;
    }
  }
  return best;
}

}  // namespace detail

// Exact star discrepancy statistic of the point set with respect to
// mu_ST^[s], evaluated over the full coordinate grid (s = 1, 2, 3).
inline DiscrepancyResult star_discrepancy(const WindowPointSet& ps, const DiscrepancyOptions& opts = {}) {
  if (ps.s < 1 || ps.s > 3)
    throw std::invalid_argument("star_discrepancy: exact evaluation supports s in {1,2,3}");
  const std::uint64_t budget = ps.s == 1 ? opts.budget_s1 : ps.s == 2 ? opts.budget_s2 : opts.budget_s3;
  if (ps.K > budget)
    throw budget_error("star_discrepancy: K = " + std::to_string(ps.K) + " exceeds budget " +
                       std::to_string(budget) + " for s = " + std::to_string(ps.s) +
                       " (lower K or raise the budget)");

  auto t0 = std::chrono::steady_clock::now();
  CoordinateGrid grid = CoordinateGrid::build(ps);
  DiscrepancyResult res;
  res.s = ps.s;
  res.K = ps.K;
  for (const auto& v : grid.values) res.grid_sizes.push_back(v.size());
  if (ps.s == 1)
    res.star_disc = detail::star_disc_1d(ps, grid);
  else if (ps.s == 2)
    res.star_disc = detail::star_disc_2d(ps, grid);
  else
    res.star_disc = detail::star_disc_3d(ps, grid);
  res.log_slope = -std::log(res.star_disc) / std::log(static_cast<double>(ps.K));
  res.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// ---------------------------------------------------------------------------
// Brute-force oracles (tiny K), independent of the sweep machinery above.
// ---------------------------------------------------------------------------

// Same statistic as star_discrepancy, by direct enumeration: every grid corner
// W, with A(R_W) counted point by point.
inline double star_discrepancy_bruteforce(const WindowPointSet& ps) {
  if (ps.K > 64 || ps.s > 3)
    throw std::invalid_argument("star_discrepancy_bruteforce: limited to K <= 64, s <= 3");
  CoordinateGrid g = CoordinateGrid::build(ps);
  const std::size_t s = ps.s;
  std::size_t n[3] = {1, 1, 1};
  for (std::size_t i = 0; i < s; ++i) n[i] = g.values[i].size();

  double best = 0.0;
  std::size_t J[3] = {1, 1, 1};
  std::vector<double> w(s);
  for (;;) {
    double mu = 1.0;
    for (std::size_t i = 0; i < s; ++i) {
      w[i] = g.values[i][J[i] - 1];
      mu *= g.cdf[i][J[i] - 1];
    }
    const double cnt = static_cast<double>(box_count(ps, w));
    best = std::max(best, std::abs(cnt / static_cast<double>(ps.K) - mu));
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

namespace detail {

// Dense non-strict prefix counts over rank space, dims padded to 3.
struct PrefixCounts {
  std::size_t n1 = 1, n2 = 1, n3 = 1;  // grid sizes (1 for unused dims)
  std::vector<std::uint32_t> p;        // (n1+1) x (n2+1) x (n3+1)

  std::uint32_t& at(std::size_t a, std::size_t b, std::size_t c) {
    return p[(a * (n2 + 1) + b) * (n3 + 1) + c];
  }
  std::uint32_t get(std::size_t a, std::size_t b, std::size_t c) const {
    return p[(a * (n2 + 1) + b) * (n3 + 1) + c];
  }

  static PrefixCounts build(const WindowPointSet& ps, const CoordinateGrid& g) {
    PrefixCounts pc;
    pc.n1 = g.values[0].size();
    pc.n2 = ps.s >= 2 ? g.values[1].size() : 1;
    pc.n3 = ps.s >= 3 ? g.values[2].size() : 1;
    pc.p.assign((pc.n1 + 1) * (pc.n2 + 1) * (pc.n3 + 1), 0);
    for (std::size_t k = 0; k < ps.K; ++k) {
      std::size_t a = g.rank(0, ps.at(k, 0));
      std::size_t b = ps.s >= 2 ? g.rank(1, ps.at(k, 1)) : 1;
      std::size_t c = ps.s >= 3 ? g.rank(2, ps.at(k, 2)) : 1;
      ++pc.at(a, b, c);
    }
    for (std::size_t a = 1; a <= pc.n1; ++a)
      for (std::size_t b = 1; b <= pc.n2; ++b)
        for (std::size_t c = 1; c <= pc.n3; ++c)
          pc.at(a, b, c) += pc.get(a - 1, b, c) + pc.get(a, b - 1, c) - pc.get(a - 1, b - 1, c) +
                            pc.get(a, b, c - 1) - pc.get(a - 1, b, c - 1) - pc.get(a, b - 1, c - 1) +
                            pc.get(a - 1, b - 1, c - 1);
    return pc;
  }
};

}  // namespace detail

// Exact extreme discrepancy: the supremum of |A(R)/K - mu(R)| over all boxes
// prod [a_i, b_i), realized by grid-aligned corner pairs plus one-sided limits
// in each bound (boxes shrinking onto atoms are reached this way).
inline double extreme_discrepancy_bruteforce(const WindowPointSet& ps) {
  if (ps.K > 32 || ps.s > 2)
    throw std::invalid_argument("extreme_discrepancy_bruteforce: limited to K <= 32, s <= 2");
  CoordinateGrid g = CoordinateGrid::build(ps);
  detail::PrefixCounts pc = detail::PrefixCounts::build(ps, g);
  const double inv_k = 1.0 / static_cast<double>(ps.K);

  // Per dimension: every (excluded-prefix, included-prefix, measure) choice of
  // lower/upper bound, each bound either at a grid value or its upper limit.
  struct Range {
    std::size_t lo, hi;  // prefix indices: count_dim = P(hi) - P(lo)
    double mu;
  };
  std::vector<std::vector<Range>> dims(ps.s);
  for (std::size_t i = 0; i < ps.s; ++i) {
    const auto& vals = g.values[i];
    const auto& F = g.cdf[i];
    const std::size_t ni = vals.size();
    for (std::size_t a = 1; a <= ni; ++a) {
      for (int sa = 0; sa < 2; ++sa) {  // lower bound: 0 includes x = beta_a, 1 excludes
        if (sa == 1 && vals[a - 1] >= 1.0) continue;
        std::size_t lo = a - 1 + static_cast<std::size_t>(sa);
        for (std::size_t b = a; b <= ni; ++b) {
          for (int sb = 0; sb < 2; ++sb) {  // upper bound: 0 excludes x = beta_b, 1 includes
            if (sb == 1 && vals[b - 1] >= 1.0) continue;
            std::size_t hi = b - 1 + static_cast<std::size_t>(sb);
            if (hi < lo) continue;
            dims[i].push_back({lo, hi, F[b - 1] - F[a - 1]});
          }
        }
      }
    }
  }

  double best = 0.0;
  if (ps.s == 1) {
    for (const auto& r : dims[0]) {
      std::uint32_t cnt = pc.get(r.hi, pc.n2, pc.n3) - pc.get(r.lo, pc.n2, pc.n3);
      best = std::max(best, std::abs(static_cast<double>(cnt) * inv_k - r.mu));
    }
  } else {
    for (const auto& r1 : dims[0])
      for (const auto& r2 : dims[1]) {
        std::uint32_t cnt = pc.get(r1.hi, r2.hi, pc.n3) - pc.get(r1.lo, r2.hi, pc.n3) -
                            pc.get(r1.hi, r2.lo, pc.n3) + pc.get(r1.lo, r2.lo, pc.n3);
        best = std::max(best, std::abs(static_cast<double>(cnt) * inv_k - r1.mu * r2.mu));
      }
  }
  return best;
}

// Randomized lower-bound estimate: max deviation over sampled corners W.
// Diagnostic only; never a substitute for the exact value.
inline double estimate_star_discrepancy(const WindowPointSet& ps, std::size_t samples, std::uint64_t seed) {
  SplitMix64 rng(seed);
  double best = 0.0;
  std::vector<double> w(ps.s);
  const double inv_k = 1.0 / static_cast<double>(ps.K);
  for (std::size_t t = 0; t < samples; ++t) {
    for (auto& wi : w) wi = rng.uniform01();
    double mu = product_cdf(w);
    best = std::max(best, std::abs(static_cast<double>(box_count(ps, w)) * inv_k - mu));
  }
  return best;
}

}  // namespace stlab
