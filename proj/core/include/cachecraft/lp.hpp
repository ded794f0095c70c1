#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cachecraft/rational.hpp"

namespace cachecraft::lp {

using VarId = std::size_t;

enum class Sense { Minimize, Maximize };
enum class Relation { LessEqual, Equal, GreaterEqual };
enum class Status { Optimal, Infeasible, Unbounded };

const char* to_string(Relation rel);
const char* to_string(Status status);

struct Term {
  VarId var;
  Rational coef;
};
using LinearExpr = std::vector<Term>;

/// A decision variable; an absent bound means infinite.
struct Variable {
  std::string name;
  std::optional<Rational> lower;
  std::optional<Rational> upper;
};

struct Constraint {
  LinearExpr terms;  // merged, zero-free, ascending by variable
  Relation relation = Relation::LessEqual;
  Rational rhs;
  std::string label;
};

/// A linear program over named variables with labeled rows.
class Problem {
 public:
  /// Declares a variable; names must be unique.
  VarId add_variable(std::string name, std::optional<Rational> lower = Rational(0),
                     std::optional<Rational> upper = std::nullopt);
  void set_bounds(VarId var, std::optional<Rational> lower, std::optional<Rational> upper);

  /// Adds a row; duplicate terms are merged and labels must be unique.
  std::size_t add_constraint(LinearExpr terms, Relation relation, Rational rhs, std::string label);

  void set_objective(Sense sense, LinearExpr terms);

  std::size_t num_variables() const { return variables_.size(); }
  std::size_t num_constraints() const { return constraints_.size(); }
  const Variable& variable(VarId id) const { return variables_.at(id); }
  const std::vector<Variable>& variables() const { return variables_; }
  const Constraint& constraint(std::size_t index) const { return constraints_.at(index); }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  Sense sense() const { return sense_; }
  const LinearExpr& objective() const { return objective_; }

  std::optional<VarId> find_variable(const std::string& name) const;
  const Constraint* find_constraint(const std::string& label) const;

 private:
  LinearExpr normalize(LinearExpr terms) const;

  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::unordered_map<std::string, VarId> variable_index_;
  std::unordered_map<std::string, std::size_t> constraint_index_;
  Sense sense_ = Sense::Minimize;
  LinearExpr objective_;
};

struct Solution {
  Status status = Status::Infeasible;
  Rational value;                 // objective value, meaningful when Optimal
  std::vector<Rational> values;   // indexed by VarId, meaningful when Optimal
  std::vector<std::string> tight_constraints;  // labels of rows holding with equality
  std::size_t pivots = 0;

  bool optimal() const { return status == Status::Optimal; }
  const Rational& operator[](VarId id) const { return values.at(id); }
  /// Variable name to value.
  std::map<std::string, Rational> assignment(const Problem& problem) const;
};

enum class PivotRule {
  /// Largest reduced cost, switching to smallest-index entering after any degenerate
  /// pivot until progress resumes. Terminates for the same reason Bland's rule does.
  Hybrid,
  /// Smallest-index entering and leaving variable throughout.
  Bland,
};

struct SolveOptions {
  PivotRule rule = PivotRule::Hybrid;
};

/// Two-phase primal simplex in exact arithmetic. When Optimal the assignment is
/// re-substituted into every row and bound; a mismatch raises InternalError.
Solution solve(const Problem& problem, const SolveOptions& options = {});

struct Violation {
  std::string label;  // row label, or "bound:<name>" for variable bounds
  Relation relation = Relation::LessEqual;
  Rational activity;
  Rational rhs;
  Rational amount;  // positive amount by which the row is violated
};

struct FeasibilityReport {
  std::vector<Violation> violations;
  Rational objective;
  bool feasible() const { return violations.empty(); }
};

/// Evaluates every row and bound at the given point.
FeasibilityReport check_feasible(const Problem& problem, const std::vector<Rational>& values);
/// Same, keyed by variable name. Throws ArgumentError if a variable is missing.
FeasibilityReport check_feasible(const Problem& problem, const std::map<std::string, Rational>& assignment);

/// Human-readable listing: objective, one constraint per line, then bounds.
std::string dump(const Problem& problem);

}  // namespace cachecraft::lp

namespace cachecraft::lp {

/// The restriction of a problem to points left unchanged by a group of variable
/// permutations, with one variable per orbit. When the group maps the feasible set
/// and the objective onto themselves, averaging any optimum over the group shows the
/// restricted problem has the same optimal value.
struct SymmetryReduction {
  Problem problem;
  std::vector<VarId> orbit;  // original variable -> reduced variable

  /// Original-space point with every variable set to its orbit's value.
  std::vector<Rational> expand(const std::vector<Rational>& reduced) const;
};

/// Each generator is a permutation of all variable ids. Rows that coincide after
/// merging orbits are kept once (first label wins).
SymmetryReduction reduce_by_symmetry(const Problem& problem, const std::vector<std::vector<VarId>>& generators);

}  // namespace cachecraft::lp
