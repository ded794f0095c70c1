#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "cachecraft/instance.hpp"
#include "cachecraft/model.hpp"
#include "cachecraft/rational.hpp"
#include "cachecraft/user_set.hpp"

/// Closed-form loads, bounds and allocations, plus explicit scheme constructors.
///
/// Every function accepts memory (or capacity) vectors in any user order; values are
/// sorted ascending internally and constructed schemes are relabeled back.
namespace cachecraft::formulas {

/// Three-user memory regions, tested in this order with the first match winning:
///   I:   m1+m2+m3 <= 1
///   II:  1 <= m1+m2+m3 <= 2, m3 < m2+3m1-1, 2m2+m3 < 2
///   III: 1 <= m1+m2+m3 <= 2, m3 >= m2+3m1-1, m1+m2 < 1
///   IV:  m1+m2+m3 >= 2, or 2m2+m3 >= 2 and m1+m2 >= 1
enum class Region { I, II, III, IV };
std::string to_string(Region region);

/// Region of a sorted three-user memory vector.
Region three_user_region(const std::vector<Rational>& sorted_m);

struct ThreeUserLoad {
  Rational load;
  Region region = Region::I;
};

/// User ordering (q_1, ..., q_K), 1-based.
using Ordering = std::vector<int>;

/// Weight of subset S in the dual form of the uncoded lower bound for a distribution
/// alpha over orderings: K for the empty set, 0 for [K], otherwise
/// sum over j and orderings whose first j users avoid S and whose (j+1)-th is in S of j*alpha_q.
Rational gamma_S(int K, const std::map<Ordering, Rational>& alpha, UserSet S);

/// K - sum_j (K-j+1) m_(j); requires sum m <= 1.
Rational load_small_memory(const CacheInstance& inst);
/// 1 - min_k m_k; requires sum m >= K-1.
Rational load_large_memory(const CacheInstance& inst);
/// Exact optimum for K = 3 together with its region.
ThreeUserLoad load_three_user(const CacheInstance& inst);

/// Lower bound on any scheme's worst-case load obtained from sliding demand windows;
/// the only formula in which N enters the arithmetic.
Rational bound_amiri(const CacheInstance& inst);
/// Cut-set style lower bound: the larger of the two s-indexed families.
Rational bound_cutset(const CacheInstance& inst);

struct AllocationResult {
  /// Optimal memory per user, in the instance's user order.
  std::vector<Rational> m_star;
  /// Number of users (by ascending capacity) that receive memory; the smallest maximizer.
  int q = 0;
  /// Every index i in [K] attaining the maximum, ascending.
  std::vector<int> maximizers;
  Rational theta;
  /// order[i] is the user index (0-based) holding the i-th smallest capacity.
  std::vector<std::size_t> order;
};

/// Optimal allocation and completion time for m_tot <= 1: the q slowest users share the
/// budget evenly.
AllocationResult dct_closed_form(const CapacityInstance& inst);
/// Completion time of the uniform allocation m_k = m_tot/K for integer m_tot in [0, K] with
/// the symmetric multicast scheme (an upper bound on the optimum).
Rational dct_uniform(const CapacityInstance& inst);
/// Any m_tot in [0, K]: memory sharing between the uniform schemes at the neighboring integers.
Rational dct_uniform_shared(const CapacityInstance& inst);

/// Completion time of the pairwise-multicast scheme for an allocation with sum m <= 1:
/// sum_k (1-m_k)/C_k - sum_{i<j} min(m_i,m_j)/max(C_i,C_j).
Rational pairwise_completion_time(const std::vector<Rational>& C, const std::vector<Rational>& m);

/// Each user caches an exclusive subfile of size m_k; pairs exchange XOR multicasts.
model::Scheme build_scheme_small_memory(const CacheInstance& inst);
/// Subfiles cached by all but one user plus one cached by everyone.
model::Scheme build_scheme_large_memory(const CacheInstance& inst);
/// Optimal scheme for K = 3 in every region.
model::Scheme build_scheme_three_user(const CacheInstance& inst);
/// Small-memory construction for an arbitrary allocation with sum m <= 1.
model::Scheme build_scheme_lemma1(const CapacityInstance& inst, const std::vector<Rational>& m);

/// Given placement a and signal sizes v, chooses side-information pieces u^T_S for every
/// multicast signal by a max-flow per user, then fills unicast pieces greedily.
/// Throws InternalError when no assignment carries all of v.
void assign_pieces(const model::PlacementVector& a, model::DeliveryPlan& plan);

}  // namespace cachecraft::formulas
