#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "cachecraft/instance.hpp"
#include "cachecraft/lp.hpp"
#include "cachecraft/rational.hpp"
#include "cachecraft/user_set.hpp"

namespace cachecraft::model {

/// a_S for every S subset of [K], indexed by mask: the fraction of each file stored
/// exclusively at the users in S.
struct PlacementVector {
  int K = 0;
  std::vector<Rational> a;

  static PlacementVector zero(int K);
  const Rational& operator[](UserSet S) const { return a.at(S.mask()); }
  Rational& operator[](UserSet S) { return a.at(S.mask()); }
};

/// Identifies the piece of user j's file carried by signal T and taken from subfile S,
/// where j is the unique member of T outside S.
struct PieceKey {
  UserSet T;
  UserSet S;
  int user() const { return (T - S).first(); }
  friend auto operator<=>(const PieceKey&, const PieceKey&) = default;
};

/// Signal sizes v_T (indexed by mask, entry 0 unused) and side-information
/// piece sizes u^T_S (absent entries are zero).
struct DeliveryPlan {
  int K = 0;
  std::vector<Rational> v;
  std::map<PieceKey, Rational> u;

  static DeliveryPlan zero(int K);
  const Rational& operator[](UserSet T) const { return v.at(T.mask()); }
  Rational& operator[](UserSet T) { return v.at(T.mask()); }
  Rational piece(UserSet T, UserSet S) const;
  /// Stores u^T_S, dropping zero entries.
  void set_piece(UserSet T, UserSet S, const Rational& value);
};

struct Scheme {
  PlacementVector placement;
  DeliveryPlan delivery;

  int K() const { return placement.K; }
  /// Sum of all signal sizes.
  Rational load() const;
  /// Sum of v_T / min_{j in T} C_j.
  Rational completion_time(const std::vector<Rational>& C) const;
  /// Relabels users: user k of this scheme becomes user perm[k-1] + 1.
  Scheme relabel(const std::vector<std::size_t>& perm) const;
};

enum class Formulation {
  /// Every side-information variable and every u <= a_S row.
  Full,
  /// Same optimal value with fewer rows: u <= a_S rows already implied by the
  /// redundancy rows are dropped, and unicast pieces are projected out as
  /// v_{j} <= sum_{S not containing j} a_S. Unicast pieces are rebuilt on extraction.
  Compact,
};

struct PlacementVars {
  int K = 0;
  std::vector<lp::VarId> a;
};

struct DeliveryVars {
  int K = 0;
  Formulation formulation = Formulation::Full;
  std::vector<lp::VarId> v;            // by mask, entry 0 unused
  std::map<PieceKey, lp::VarId> u;     // all pieces (Full) or multicast pieces only (Compact)
};

std::string placement_name(UserSet S);
std::string signal_name(UserSet T);
std::string piece_name(UserSet T, UserSet S);

/// Declares a_S in [0,1] for all S, the row "norm" (sum a_S = 1) and rows
/// "mem:k" (sum_{S containing k} a_S <= m_k).
PlacementVars build_placement_rows(const CacheInstance& inst, lp::Problem& into);
/// Same, with memory given by existing variables: rows read sum a_S - m_k <= 0.
PlacementVars build_placement_rows(int K, const std::vector<lp::VarId>& memory, lp::Problem& into);

/// Declares v_T and u^T_S and adds the rows "struct:[T]:j", "red:[S]:j",
/// "complete:k", and (variable placement) "cap:[T]|[S]" coupling rows.
DeliveryVars build_delivery_rows(int K, lp::Problem& into, const PlacementVars& placement,
                                 Formulation formulation = Formulation::Full);
/// Constant placement: u <= a_S become variable bounds.
DeliveryVars build_delivery_rows(int K, lp::Problem& into, const PlacementVector& placement);

/// Placement and delivery rows for a fixed memory vector, objective min sum v_T.
struct SchemeModel {
  lp::Problem problem;
  PlacementVars placement;
  DeliveryVars delivery;
};
SchemeModel build_scheme_model(const CacheInstance& inst, Formulation formulation = Formulation::Full);

/// Writes the scheme's values into `values` (sized to the problem) at the model's variables.
void write_assignment(const Scheme& scheme, const PlacementVars& pv, const DeliveryVars& dv,
                      std::vector<Rational>& values);
/// Reads a scheme back; Compact models get their unicast pieces rebuilt greedily.
Scheme read_scheme(const PlacementVars& pv, const DeliveryVars& dv, const std::vector<Rational>& values);

/// Fills unicast pieces u^{j}_S greedily over S in ascending mask order with u <= a_S.
void fill_unicast_pieces(const PlacementVector& a, DeliveryPlan& plan);

/// Checks a scheme against the full placement and delivery rows of the instance.
lp::FeasibilityReport check_scheme(const CacheInstance& inst, const Scheme& scheme);

struct SideInfoViolation {
  UserSet S_prime;
  int j = 0;
  Rational demand;     // sum of v_T over T containing {j} and S'
  Rational available;  // sum of a_S over S containing S' but not j
};

/// For every S' with 1 <= |S'| <= K-2 and j not in S', checks that signals serving j
/// together with all of S' never exceed the side information S' holds outside j.
std::vector<SideInfoViolation> check_side_information(const Scheme& scheme);

}  // namespace cachecraft::model
