#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "stlab/angles.hpp"
#include "stlab/parallel.hpp"
#include "stlab/st_measure.hpp"

namespace stlab {

struct AverageReport {
  std::string curve_label;
  std::string function_name;
  std::size_t s = 0;
  std::size_t K = 0;
  double empirical = 0.0;
  double reference = 0.0;
  double rel_err = 0.0;
  double log_slope = 0.0;  // +inf marks an exact match (rel_err == 0)
};

// (1/K) sum_{k=1}^K scale * prod_i f_i(x_{k+i-1}).  Each window product is
// recomputed directly in O(s); near-zero factors make rolling quotients
// numerically unsafe.  Accumulation is compensated and split into fixed-size
// chunks combined in index order, so the result is independent of the thread
// count.
inline double window_average(const AngleSequence& seq, const ProductTestFunction& f, std::size_t K,
                             unsigned threads = 0) {
  const std::size_t s = f.s;
  if (K < 1) throw std::invalid_argument("window_average: K must be >= 1");
  if (seq.length() < K + s - 1)
    throw std::length_error("window_average: sequence of length " + std::to_string(seq.length()) +
                            " too short for K = " + std::to_string(K) + ", s = " + std::to_string(s));

  constexpr std::size_t kChunk = 65536;
  const std::size_t n_chunks = (K + kChunk - 1) / kChunk;
  std::vector<double> partial(n_chunks, 0.0);
  const double* angles = seq.angles.data();
  const Factor* factors = f.factors.data();
  const double scale = f.scale;

  parallel_chunks(K, kChunk, threads, [&](std::size_t chunk, std::size_t b, std::size_t e) {
    KahanSum acc;
    for (std::size_t k = b; k < e; ++k) {
      double prod = scale;
      for (std::size_t i = 0; i < s; ++i) prod *= factors[i](angles[k + i]);
      acc.add(prod);
    }
    partial[chunk] = acc.value();
  });

  KahanSum total;
  for (double v : partial) total.add(v);
  return total.value() / static_cast<double>(K);
}

inline AverageReport relerr_logslope(const AngleSequence& seq, const ProductTestFunction& f, std::size_t K,
                                     unsigned threads = 0) {
  AverageReport rep;
  rep.curve_label = seq.curve_label;
  rep.function_name = f.name;
  rep.s = f.s;
  rep.K = K;
  rep.reference = f.reference_integral();
  if (rep.reference == 0.0)
    throw std::domain_error("relerr_logslope: reference integral of " + f.name + " is zero");
  rep.empirical = window_average(seq, f, K, threads);
  rep.rel_err = (rep.empirical - rep.reference) / rep.reference;
  rep.log_slope = rep.rel_err == 0.0 ? std::numeric_limits<double>::infinity()
                                     : -std::log(std::abs(rep.rel_err)) / std::log(static_cast<double>(K));
  return rep;
}

}  // namespace stlab
