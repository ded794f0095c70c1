#pragma once

#include <functional>
#include <vector>

#include "cachecraft/instance.hpp"
#include "cachecraft/lp.hpp"
#include "cachecraft/model.hpp"

namespace cachecraft::solve {

struct LoadSolution {
  Rational load;
  model::Scheme scheme;
};

enum class BoundKind { UncodedLB, AmiriLB, CutSetLB };

struct BoundValue {
  Rational value;
  BoundKind kind = BoundKind::UncodedLB;
};

struct DctSolution {
  Rational dct;
  std::vector<Rational> m;
  model::Scheme scheme;
};

struct SolverOptions {
  lp::SolveOptions lp;
  model::Formulation formulation = model::Formulation::Compact;
  /// Users with identical data are interchangeable; solve over schemes that treat them
  /// alike (same optimal value, much smaller program).
  bool exploit_symmetry = true;
  /// Called with each linear program right before it is solved.
  std::function<void(const lp::Problem&)> inspect;
};

/// Minimum worst-case delivery load over uncoded placement and linear XOR delivery
/// (all-distinct demands), with one optimal scheme.
LoadSolution solve_min_load(const CacheInstance& inst, const SolverOptions& options = {});

/// Lower bound on the load of any delivery for uncoded placement: min R over a in the
/// placement polytope subject to one genie row per user ordering. Rows are added lazily,
/// most violated ordering first, until none is violated. Requires K <= 8.
BoundValue solve_uncoded_lower_bound(const CacheInstance& inst, const SolverOptions& options = {});

/// Joint memory allocation and scheme minimizing sum_T v_T / min_{j in T} C_j subject
/// to sum_k m_k <= m_tot and 0 <= m_k <= 1.
DctSolution solve_min_dct(const CapacityInstance& inst, const SolverOptions& options = {});

/// Same objective with the memory vector fixed to `m`.
DctSolution evaluate_dct(const CapacityInstance& inst, const std::vector<Rational>& m,
                         const SolverOptions& options = {});

/// min_{j in T} C_j for every nonempty T, indexed by mask.
std::vector<Rational> bottleneck_rates(const std::vector<Rational>& C);

}  // namespace cachecraft::solve
