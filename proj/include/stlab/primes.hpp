#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "stlab/errors.hpp"

namespace stlab {

struct PrimeTable {
  std::vector<std::uint64_t> primes;

  std::size_t count() const { return primes.size(); }
  std::uint64_t operator[](std::size_t i) const { return primes[i]; }  // 0-based
  // 1-based access matching the usual p_k indexing.
  std::uint64_t nth(std::size_t k) const { return primes.at(k - 1); }
};

namespace detail {

// Upper bound on the n-th prime: n(ln n + ln ln n) for n >= 6.
inline std::uint64_t nth_prime_bound(std::size_t n) {
  if (n < 6) return 15;
  double x = static_cast<double>(n);
  double b = x * (std::log(x) + std::log(std::log(x)));
  return static_cast<std::uint64_t>(b) + 16;
}

inline std::vector<std::uint32_t> small_primes_upto(std::uint32_t limit) {
  std::vector<bool> composite(limit + 1, false);
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = std::uint64_t(i) * i; j <= limit; j += i) composite[j] = true;
  }
  return out;
}

}  // namespace detail

// First `count` primes in ascending order via a segmented sieve.
inline PrimeTable first_primes(std::size_t count, std::size_t max_count = 20000000) {
  if (count < 1) throw std::invalid_argument("first_primes: count must be >= 1");
  if (count > max_count)
    throw resource_limit_error("first_primes: requested " + std::to_string(count) +
                               " primes exceeds configured maximum " + std::to_string(max_count));

  PrimeTable table;
  table.primes.reserve(count);
  std::uint64_t bound = detail::nth_prime_bound(count);

  for (;;) {
    table.primes.clear();
    const auto base = detail::small_primes_upto(static_cast<std::uint32_t>(std::sqrt(static_cast<double>(bound))) + 1);
    const std::uint64_t segment = 1u << 20;
    std::vector<bool> mark;
    for (std::uint64_t lo = 2; lo <= bound && table.primes.size() < count; lo += segment) {
      std::uint64_t hi = std::min(bound, lo + segment - 1);
      mark.assign(hi - lo + 1, false);
      for (std::uint32_t p : base) {
        std::uint64_t p64 = p;
        if (p64 * p64 > hi) break;
        std::uint64_t start = std::max(p64 * p64, (lo + p64 - 1) / p64 * p64);
        for (std::uint64_t j = start; j <= hi; j += p64) mark[j - lo] = true;
      }
      for (std::uint64_t v = lo; v <= hi && table.primes.size() < count; ++v)
        if (!mark[v - lo]) table.primes.push_back(v);
    }
    if (table.primes.size() >= count) break;
    bound *= 2;  // classical bound only guaranteed for n >= 6; double on shortfall
  }
  return table;
}

}  // namespace stlab
