#pragma once

#include <cstddef>
#include <vector>

#include "cachecraft/rational.hpp"

namespace cachecraft {

/// K users, N files, normalized memory m_k = M_k / N per user (in user order, not sorted).
struct CacheInstance {
  int K = 0;
  int N = 0;
  std::vector<Rational> m;
};

/// A cache instance plus per-user link capacities C_k and a total memory budget m_tot.
/// The `base.m` vector is unused by the allocation solvers, which choose m themselves.
struct CapacityInstance {
  CacheInstance base;
  std::vector<Rational> C;
  Rational m_tot;
};

/// Checks every range invariant and throws ValidationError listing all violations.
const CacheInstance& validate_instance(const CacheInstance& inst);
const CapacityInstance& validate_instance(const CapacityInstance& inst);

/// Indices 0..n-1 ordered so values[order[0]] <= values[order[1]] <= ... (stable).
std::vector<std::size_t> ascending_order(const std::vector<Rational>& values);

/// Prints a one-line warning to stderr when K exceeds soft_max_users().
void warn_if_large(int K);

}  // namespace cachecraft
