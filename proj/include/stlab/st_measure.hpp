#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stlab/errors.hpp"

namespace stlab {

inline constexpr double kPi = 3.14159265358979323846;

// CDF of the Sato-Tate measure 2 sin^2(pi u) du on [0,1].
inline double st_cdf(double w) {
  if (!(w >= 0.0 && w <= 1.0)) throw std::domain_error("st_cdf: argument outside [0,1]");
  return w - std::sin(2.0 * kPi * w) / (2.0 * kPi);
}

inline double st_density(double u) {
  double s = std::sin(kPi * u);
  return 2.0 * s * s;
}

// mu_ST^[s] of the anchored box [0,w1) x ... x [0,ws).
template <typename It>
inline double product_cdf(It begin, It end) {
  double r = 1.0;
  for (It it = begin; it != end; ++it) r *= st_cdf(*it);
  return r;
}

inline double product_cdf(const std::vector<double>& w) { return product_cdf(w.begin(), w.end()); }

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod (7-15) quadrature with absolute-tolerance bisection.
// ---------------------------------------------------------------------------

namespace detail {

// Nodes/weights of the 15-point Kronrod rule on [-1,1]; odd entries carry the
// embedded 7-point Gauss rule.
inline constexpr double kGk15Nodes[15] = {
    -0.9914553711208126, -0.9491079123427585, -0.8648644233597691, -0.7415311855993945,
    -0.5860872354676911, -0.4058451513773972, -0.2077849550078985, 0.0,
    0.2077849550078985,  0.4058451513773972,  0.5860872354676911,  0.7415311855993945,
    0.8648644233597691,  0.9491079123427585,  0.9914553711208126};
inline constexpr double kGk15Weights[15] = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679, 0.1903505780647854, 0.2044329400752989, 0.2094821410847278,
    0.2044329400752989, 0.1903505780647854, 0.1690047266392679, 0.1406532597155259,
    0.1047900103222502, 0.0630920926299786, 0.0229353220105292};
inline constexpr double kG7Weights[7] = {0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
                                         0.4179591836734694, 0.3818300505051189, 0.2797053914892767,
                                         0.1294849661688697};

template <typename F>
inline void gk15(const F& f, double a, double b, double& kronrod, double& err) {
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  double k = 0.0, g = 0.0;
  for (int i = 0; i < 15; ++i) {
    double v = f(c + h * kGk15Nodes[i]);
    k += v * kGk15Weights[i];
    if (i % 2 == 1) g += v * kG7Weights[i / 2];
  }
  kronrod = k * h;
  err = std::abs((k - g) * h);
}

template <typename F>
inline double adaptive_gk(const F& f, double a, double b, double tol, int depth, int max_depth) {
  double v, err;
  gk15(f, a, b, v, err);
  if (err <= tol || err <= 1e-17 * std::abs(v)) return v;
  if (depth >= max_depth)
    throw std::runtime_error("adaptive quadrature failed to converge (max refinement depth reached)");
  double m = 0.5 * (a + b);
  return adaptive_gk(f, a, m, 0.5 * tol, depth + 1, max_depth) +
         adaptive_gk(f, m, b, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace detail

template <typename F>
inline double integrate(const F& f, double a, double b, double tol = 1e-10, int max_depth = 48) {
  return detail::adaptive_gk(f, a, b, tol, 0, max_depth);
}

// Integral of f against the Sato-Tate measure on [0,1].
template <typename F>
inline double quad_factor_integral(const F& f, double tol = 1e-10) {
  if (!(tol > 0)) throw std::invalid_argument("quad_factor_integral: tol must be positive");
  return integrate([&](double u) { return f(u) * st_density(u); }, 0.0, 1.0, tol);
}

// ---------------------------------------------------------------------------
// Closed-form factor integrals of the built-in test function families.
// ---------------------------------------------------------------------------

// integral of exp(-u/i) d mu_ST = (1 - e^{-1/i}) * 4 pi^2 i^3 / (1 + 4 pi^2 i^2)
inline double g_factor_integral(std::uint64_t i) {
  if (i < 1) throw std::invalid_argument("g_factor_integral: i >= 1 required");
  double x = static_cast<double>(i);
  double pi2 = 4.0 * kPi * kPi;
  return -std::expm1(-1.0 / x) * pi2 * x * x * x / (1.0 + pi2 * x * x);
}

// integral of cos(pi u / (2 sqrt i)) d mu_ST
//   = (2 sqrt(i)/pi) sin(pi/(2 sqrt i)) * 16 i / (16 i - 1)
inline double h_factor_integral(std::uint64_t i) {
  if (i < 1) throw std::invalid_argument("h_factor_integral: i >= 1 required");
  double x = static_cast<double>(i);
  double rt = std::sqrt(x);
  return (2.0 * rt / kPi) * std::sin(kPi / (2.0 * rt)) * 16.0 * x / (16.0 * x - 1.0);
}

// ---------------------------------------------------------------------------
// Product test functions: s univariate factors with reference integrals.
// ---------------------------------------------------------------------------

// One univariate factor. The closed kinds keep window evaluation branch-cheap;
// Custom allows programmatic construction in tests.
struct Factor {
  enum class Kind { Constant, LogShift, PowShift, ExpNegScale, ExpSqrtShift, CosScale, Custom } kind;
  double c = 0.0;  // shift or constant
  double e = 0.0;  // exponent or rate
  std::function<double(double)> fn;

  double operator()(double u) const {
    switch (kind) {
      case Kind::Constant: return c;
      case Kind::LogShift: return std::log(c + u);
      case Kind::PowShift: return std::pow(c + u, e);
      case Kind::ExpNegScale: return std::exp(-e * u);
      case Kind::ExpSqrtShift: return std::exp(std::sqrt(c + u));
      case Kind::CosScale: return std::cos(e * u);
      case Kind::Custom: return fn(u);
    }
    return 0.0;
  }

  static Factor constant(double v) { return {Kind::Constant, v, 0.0, nullptr}; }
  static Factor log_shift(double c) { return {Kind::LogShift, c, 0.0, nullptr}; }
  static Factor pow_shift(double c, double e) { return {Kind::PowShift, c, e, nullptr}; }
  static Factor exp_neg_scale(double rate) { return {Kind::ExpNegScale, 0.0, rate, nullptr}; }
  static Factor exp_sqrt_shift(double c) { return {Kind::ExpSqrtShift, c, 0.0, nullptr}; }
  static Factor cos_scale(double rate) { return {Kind::CosScale, 0.0, rate, nullptr}; }
  static Factor custom(std::function<double(double)> f) { return {Kind::Custom, 0.0, 0.0, std::move(f)}; }
};

struct ProductTestFunction {
  std::string name;
  std::size_t s = 0;
  std::vector<Factor> factors;
  std::vector<double> factor_integrals;  // each against mu_ST
  double scale = 1.0;

  double reference_integral() const {
    double r = scale;
    for (double v : factor_integrals) r *= v;
    return r;
  }
};

// Built-in families: "f10" (fixed s = 10), "g" and "h" (any s >= 1).
inline ProductTestFunction builtin_test_function(const std::string& name, std::size_t s) {
  ProductTestFunction f;
  f.name = name;
  if (name == "f10") {
    if (s != 10 && s != 0) throw std::invalid_argument("builtin_test_function: f10 has dimension 10");
    f.s = 10;
    f.scale = 1.0;
    f.factors = {Factor::log_shift(2.0),       Factor::log_shift(3.0),
                 Factor::exp_neg_scale(1.0),   Factor::pow_shift(1.0, 2.0),
                 Factor::pow_shift(2.0, 1.0),  Factor::pow_shift(2.0, 0.5),
                 Factor::pow_shift(3.0, 0.5),  Factor::pow_shift(4.0, 1.0 / 3.0),
                 Factor::pow_shift(8.0, 0.25), Factor::exp_sqrt_shift(1.0)};
    f.factor_integrals.reserve(10);
    for (const auto& fac : f.factors) f.factor_integrals.push_back(quad_factor_integral(fac));
    return f;
  }
  if (s < 1) throw std::invalid_argument("builtin_test_function: dimension must be >= 1");
  if (name == "g") {
    f.s = s;
    f.scale = 100.0;
    f.factors.reserve(s);
    f.factor_integrals.reserve(s);
    for (std::size_t i = 1; i <= s; ++i) {
      f.factors.push_back(Factor::exp_neg_scale(1.0 / static_cast<double>(i)));
      f.factor_integrals.push_back(g_factor_integral(i));
    }
    return f;
  }
  if (name == "h") {
    f.s = s;
    f.scale = 100.0;
    f.factors.reserve(s);
    f.factor_integrals.reserve(s);
    for (std::size_t i = 1; i <= s; ++i) {
      f.factors.push_back(Factor::cos_scale(kPi / (2.0 * std::sqrt(static_cast<double>(i)))));
      f.factor_integrals.push_back(h_factor_integral(i));
    }
    return f;
  }
  throw std::invalid_argument("builtin_test_function: unknown name '" + name + "' (expected f10, g or h)");
}

}  // namespace stlab
