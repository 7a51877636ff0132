#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace stlab {

using u64 = std::uint64_t;
using u128 = unsigned __int128;
using i64 = std::int64_t;

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(u128(a) * b % m); }

inline u64 addmod(u64 a, u64 b, u64 m) {
  u64 s = a + b;  // a,b < m <= 2^63 in all call sites, no wrap
  return s >= m ? s - m : s;
}

inline u64 submod(u64 a, u64 b, u64 m) { return a >= b ? a - b : a + m - b; }

inline u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

// Extended Euclid; m need not be prime but gcd(a, m) must be 1.
inline u64 invmod(u64 a, u64 m) {
  i64 t = 0, nt = 1;
  i64 r = static_cast<i64>(m), nr = static_cast<i64>(a % m);
  while (nr != 0) {
    i64 q = r / nr;
    i64 tmp = t - q * nt;
    t = nt;
    nt = tmp;
    tmp = r - q * nr;
    r = nr;
    nr = tmp;
  }
  if (r != 1) throw std::domain_error("invmod: argument not invertible");
  return static_cast<u64>(t < 0 ? t + static_cast<i64>(m) : t);
}

inline u64 isqrt64(u64 x) {
  if (x == 0) return 0;
  u64 r = static_cast<u64>(std::sqrt(static_cast<double>(x)));
  while (r > 0 && r * r > x) --r;
  while ((r + 1) * (r + 1) <= x) ++r;
  return r;
}

// Montgomery arithmetic mod an odd modulus, R = 2^64.
struct Montgomery64 {
  u64 n;     // modulus
  u64 ninv;  // -n^{-1} mod 2^64
  u64 r2;    // 2^128 mod n
  u64 one;   // 2^64 mod n

  explicit Montgomery64(u64 modulus) : n(modulus) {
    u64 inv = modulus;  // Newton iteration, valid for odd modulus
    for (int i = 0; i < 5; ++i) inv *= 2 - modulus * inv;
    ninv = ~inv + 1;
    u64 r = (~u64(0) % modulus) + 1;  // 2^64 mod n
    if (r == modulus) r = 0;
    one = r;
    r2 = mulmod(r, r, modulus);
  }

  u64 reduce(u128 t) const {
    u64 m = static_cast<u64>(t) * ninv;
    u128 s = t + u128(m) * n;
    u64 r = static_cast<u64>(s >> 64);
    return r >= n ? r - n : r;
  }
  u64 mul(u64 a, u64 b) const { return reduce(u128(a) * b); }
  u64 to(u64 a) const { return mul(a % n, r2); }
  u64 from(u64 a) const { return reduce(a); }
  u64 add(u64 a, u64 b) const { return addmod(a, b, n); }
  u64 sub(u64 a, u64 b) const { return submod(a, b, n); }
  u64 neg(u64 a) const { return a == 0 ? 0 : n - a; }
  u64 pow(u64 a, u64 e) const {
    u64 r = one;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
  // Inversion through plain representation; cheaper than a Fermat power.
  u64 inv(u64 a) const { return to(invmod(from(a), n)); }
};

// Legendre symbol (a|p) for odd prime p: +1 residue, -1 non-residue, 0 if p | a.
inline int legendre(u64 a, u64 p) {
  a %= p;
  if (a == 0) return 0;
  u64 r = powmod(a, (p - 1) / 2, p);
  return r == 1 ? 1 : -1;
}

// Tonelli-Shanks square root mod an odd prime; requires (a|p) = 1.
inline u64 sqrtmod(u64 a, u64 p) {
  a %= p;
  if (a == 0) return 0;
  if (p % 4 == 3) return powmod(a, (p + 1) / 4, p);
  u64 q = p - 1, s = 0;
  while ((q & 1) == 0) {
    q >>= 1;
    ++s;
  }
  u64 z = 2;
  while (legendre(z, p) != -1) ++z;
  u64 m = s;
  u64 c = powmod(z, q, p);
  u64 t = powmod(a, q, p);
  u64 r = powmod(a, (q + 1) / 2, p);
  while (t != 1) {
    u64 i = 0, tt = t;
    while (tt != 1) {
      tt = mulmod(tt, tt, p);
      ++i;
      if (i == m) throw std::domain_error("sqrtmod: argument is not a quadratic residue");
    }
    u64 b = c;
    for (u64 j = 0; j + i + 1 < m; ++j) b = mulmod(b, b, p);
    m = i;
    c = mulmod(b, b, p);
    t = mulmod(t, c, p);
    r = mulmod(r, b, p);
  }
  return r;
}

// 64-bit mixing suitable for deriving deterministic seeds.
inline u64 mix64(u64 x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// splitmix64: tiny deterministic generator for reproducible sampling.
struct SplitMix64 {
  u64 state;
  explicit SplitMix64(u64 seed) : state(seed) {}
  u64 next() {
    state += 0x9e3779b97f4a7c15ULL;
    u64 z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  u64 below(u64 bound) { return next() % bound; }
  double uniform01() { return (next() >> 11) * 0x1.0p-53; }
};

}  // namespace stlab
