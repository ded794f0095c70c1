#pragma once

// Independent reference computations used as test oracles. They work on raw GMP
// rationals and plain loops so they share no code with the library paths they check.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "cachecraft/instance.hpp"
#include "cachecraft/rational.hpp"

namespace oracle {

using cachecraft::CacheInstance;
using cachecraft::CapacityInstance;
using cachecraft::Rational;

inline std::vector<mpq_class> to_mpq(const std::vector<Rational>& values) {
  std::vector<mpq_class> out;
  for (const Rational& v : values) out.push_back(v.to_mpq());
  return out;
}

inline std::vector<mpq_class> sorted_mpq(const std::vector<Rational>& values) {
  std::vector<mpq_class> out = to_mpq(values);
  std::sort(out.begin(), out.end());
  return out;
}

inline Rational from(const mpq_class& q) { return Rational(q); }

inline mpq_class ratio(long p, long q) {
  mpq_class r{mpz_class(p), mpz_class(q)};
  r.canonicalize();
  return r;
}

/// Literal evaluation of the sliding-window bound by exhaustive (s, l) enumeration.
inline Rational amiri(const CacheInstance& inst) {
  std::vector<mpq_class> m = sorted_mpq(inst.m);
  long K = inst.K;
  long N = inst.N;
  bool have = false;
  mpq_class best;
  for (long s = 1; s <= K; ++s) {
    long lmax = (N + s - 1) / s;
    for (long l = 1; l <= lmax; ++l) {
      long ceil_nl = (N + l - 1) / l;
      long g = std::min(std::max(ceil_nl - s, 0L), K - s);
      mpq_class msum = 0;
      for (long i = 0; i < s + g; ++i) msum += m[i];
      mpq_class term = ratio(N - std::max(N - K * l, 0L), l) -
                       (mpq_class(s * N) * msum + mpq_class(g * std::max(N - l * s, 0L))) / mpq_class(l * (s + g));
      term.canonicalize();
      if (!have || term > best) best = term;
      have = true;
    }
  }
  return from(best);
}

inline Rational cutset(const CacheInstance& inst) {
  std::vector<mpq_class> m = sorted_mpq(inst.m);
  long N = inst.N;
  long limit = std::min<long>(inst.K, N);
  mpq_class best = 0;
  for (long s = 1; s <= limit; ++s) {
    mpq_class a = s;
    mpq_class prefix = 0;
    for (long k = 1; k <= s; ++k) {
      prefix += m[k - 1];
      a -= mpq_class(N) * prefix / mpq_class(N - k + 1);
    }
    mpq_class b = mpq_class(s) * (1 - prefix);
    if (s == 1 || a > best) best = a;
    if (b > best) best = b;
  }
  return from(best);
}

/// Pairwise-multicast completion time for sorted capacities, evaluated term by term.
inline mpq_class pairwise_dct(const std::vector<mpq_class>& C, const std::vector<mpq_class>& m) {
  mpq_class total = 0;
  for (std::size_t k = 0; k < C.size(); ++k) total += (1 - m[k]) / C[k];
  for (std::size_t i = 0; i < C.size(); ++i) {
    for (std::size_t j = i + 1; j < C.size(); ++j) total -= std::min(m[i], m[j]) / std::max(C[i], C[j]);
  }
  return total;
}

/// Best completion time over the K "share evenly among the i slowest users" allocations.
inline Rational best_even_split(const CapacityInstance& inst) {
  std::vector<mpq_class> C = sorted_mpq(inst.C);
  mpq_class m_tot = inst.m_tot.to_mpq();
  mpq_class best;
  for (std::size_t i = 1; i <= C.size(); ++i) {
    std::vector<mpq_class> m(C.size(), mpq_class(0));
    for (std::size_t k = 0; k < i; ++k) m[k] = m_tot / mpq_class(static_cast<long>(i));
    mpq_class value = pairwise_dct(C, m);
    if (i == 1 || value < best) best = value;
  }
  return from(best);
}

/// Random rational in [0, 1] with the given denominator.
inline Rational fraction(std::mt19937_64& rng, long denominator) {
  std::uniform_int_distribution<long> pick(0, denominator);
  return Rational(pick(rng), denominator);
}

inline CacheInstance instance(int K, std::vector<Rational> m) { return CacheInstance{K, K, std::move(m)}; }

}  // namespace oracle
