#include <algorithm>
#include <sstream>

#include "cachecraft/errors.hpp"
#include "cachecraft/lp.hpp"

namespace cachecraft::lp {

const char* to_string(Relation rel) {
  switch (rel) {
    case Relation::LessEqual: return "<=";
    case Relation::Equal: return "=";
    case Relation::GreaterEqual: return ">=";
  }
  return "?";
}

const char* to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
  }
  return "?";
}

VarId Problem::add_variable(std::string name, std::optional<Rational> lower, std::optional<Rational> upper) {
  if (variable_index_.count(name)) throw ArgumentError("duplicate variable '" + name + "'");
  if (lower && upper && *upper < *lower) throw ArgumentError("empty bounds for variable '" + name + "'");
  VarId id = variables_.size();
  variable_index_.emplace(name, id);
  variables_.push_back(Variable{std::move(name), std::move(lower), std::move(upper)});
  return id;
}

void Problem::set_bounds(VarId var, std::optional<Rational> lower, std::optional<Rational> upper) {
  Variable& v = variables_.at(var);
  if (lower && upper && *upper < *lower) throw ArgumentError("empty bounds for variable '" + v.name + "'");
  v.lower = std::move(lower);
  v.upper = std::move(upper);
}

LinearExpr Problem::normalize(LinearExpr terms) const {
  for (const Term& t : terms) {
    if (t.var >= variables_.size()) throw ArgumentError("term references undeclared variable " + std::to_string(t.var));
  }
  std::stable_sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
  LinearExpr out;
  out.reserve(terms.size());
  for (Term& t : terms) {
    if (!out.empty() && out.back().var == t.var) {
      out.back().coef += t.coef;
    } else {
      out.push_back(std::move(t));
    }
  }
  std::erase_if(out, [](const Term& t) { return t.coef.is_zero(); });
  return out;
}

std::size_t Problem::add_constraint(LinearExpr terms, Relation relation, Rational rhs, std::string label) {
  if (constraint_index_.count(label)) throw ArgumentError("duplicate constraint label '" + label + "'");
  std::size_t index = constraints_.size();
  constraints_.push_back(Constraint{normalize(std::move(terms)), relation, std::move(rhs), label});
  constraint_index_.emplace(std::move(label), index);
  return index;
}

void Problem::set_objective(Sense sense, LinearExpr terms) {
  sense_ = sense;
  objective_ = normalize(std::move(terms));
}

std::optional<VarId> Problem::find_variable(const std::string& name) const {
  auto it = variable_index_.find(name);
  if (it == variable_index_.end()) return std::nullopt;
  return it->second;
}

const Constraint* Problem::find_constraint(const std::string& label) const {
  auto it = constraint_index_.find(label);
  return it == constraint_index_.end() ? nullptr : &constraints_[it->second];
}

std::map<std::string, Rational> Solution::assignment(const Problem& problem) const {
  std::map<std::string, Rational> out;
  for (VarId i = 0; i < values.size() && i < problem.num_variables(); ++i) out.emplace(problem.variable(i).name, values[i]);
  return out;
}

FeasibilityReport check_feasible(const Problem& problem, const std::vector<Rational>& values) {
  if (values.size() != problem.num_variables()) {
    throw ArgumentError("assignment has " + std::to_string(values.size()) + " values for " +
                        std::to_string(problem.num_variables()) + " variables");
  }
  FeasibilityReport report;
  for (const Term& t : problem.objective()) report.objective += t.coef * values[t.var];
  for (const Constraint& c : problem.constraints()) {
    Rational activity;
    for (const Term& t : c.terms) activity += t.coef * values[t.var];
    Rational excess;
    switch (c.relation) {
      case Relation::LessEqual: excess = activity - c.rhs; break;
      case Relation::GreaterEqual: excess = c.rhs - activity; break;
      case Relation::Equal: excess = (activity - c.rhs).abs(); break;
    }
    if (excess.sign() > 0) report.violations.push_back(Violation{c.label, c.relation, activity, c.rhs, excess});
  }
  for (VarId i = 0; i < problem.num_variables(); ++i) {
    const Variable& v = problem.variable(i);
    if (v.lower && values[i] < *v.lower) {
      report.violations.push_back(
          Violation{"bound:" + v.name, Relation::GreaterEqual, values[i], *v.lower, *v.lower - values[i]});
    }
    if (v.upper && values[i] > *v.upper) {
      report.violations.push_back(
          Violation{"bound:" + v.name, Relation::LessEqual, values[i], *v.upper, values[i] - *v.upper});
    }
  }
  return report;
}

FeasibilityReport check_feasible(const Problem& problem, const std::map<std::string, Rational>& assignment) {
  std::vector<Rational> values(problem.num_variables());
  for (VarId i = 0; i < problem.num_variables(); ++i) {
    auto it = assignment.find(problem.variable(i).name);
    if (it == assignment.end()) throw ArgumentError("assignment is missing variable '" + problem.variable(i).name + "'");
    values[i] = it->second;
  }
  return check_feasible(problem, values);
}

namespace {

void write_expr(std::ostream& os, const Problem& problem, const LinearExpr& terms) {
  if (terms.empty()) {
    os << "0";
    return;
  }
  bool first = true;
  for (const Term& t : terms) {
    Rational c = t.coef;
    if (first) {
      if (c.sign() < 0) os << "-";
    } else {
      os << (c.sign() < 0 ? " - " : " + ");
    }
    c = c.abs();
    if (c != Rational(1)) os << c << " ";
    os << problem.variable(t.var).name;
    first = false;
  }
}

}  // namespace

std::string dump(const Problem& problem) {
  std::ostringstream os;
  os << (problem.sense() == Sense::Minimize ? "minimize " : "maximize ");
  write_expr(os, problem, problem.objective());
  os << "\nsubject to (" << problem.num_constraints() << " rows)\n";
  for (const Constraint& c : problem.constraints()) {
    os << "  " << c.label << ": ";
    write_expr(os, problem, c.terms);
    os << " " << to_string(c.relation) << " " << c.rhs << "\n";
  }
  os << "bounds (" << problem.num_variables() << " variables)\n";
  for (const Variable& v : problem.variables()) {
    os << "  " << (v.lower ? v.lower->str() : "-inf") << " <= " << v.name << " <= " << (v.upper ? v.upper->str() : "+inf")
       << "\n";
  }
  return os.str();
}

}  // namespace cachecraft::lp
