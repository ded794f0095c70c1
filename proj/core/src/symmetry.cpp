#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>

#include "cachecraft/errors.hpp"
#include "cachecraft/lp.hpp"

namespace cachecraft::lp {
namespace {

VarId find_root(std::vector<VarId>& parent, VarId x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

}  // namespace

std::vector<Rational> SymmetryReduction::expand(const std::vector<Rational>& reduced) const {
  std::vector<Rational> out(orbit.size());
  for (VarId i = 0; i < orbit.size(); ++i) out[i] = reduced.at(orbit[i]);
  return out;
}

SymmetryReduction reduce_by_symmetry(const Problem& problem, const std::vector<std::vector<VarId>>& generators) {
  const std::size_t n = problem.num_variables();
  std::vector<VarId> parent(n);
  std::iota(parent.begin(), parent.end(), VarId{0});
  for (const auto& g : generators) {
    if (g.size() != n) throw ArgumentError("symmetry generator does not cover every variable");
    for (VarId i = 0; i < n; ++i) {
      VarId a = find_root(parent, i);
      VarId b = find_root(parent, g[i]);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }

  SymmetryReduction out;
  out.orbit.assign(n, 0);
  std::vector<VarId> reduced_of_root(n, static_cast<VarId>(-1));
  for (VarId i = 0; i < n; ++i) {
    VarId root = find_root(parent, i);
    if (reduced_of_root[root] == static_cast<VarId>(-1)) {
      const Variable& v = problem.variable(i);
      reduced_of_root[root] = out.problem.add_variable(v.name, v.lower, v.upper);
    }
    out.orbit[i] = reduced_of_root[root];
  }

  auto map_terms = [&](const LinearExpr& terms) {
    LinearExpr mapped;
    mapped.reserve(terms.size());
    for (const Term& t : terms) mapped.push_back({out.orbit[t.var], t.coef});
    return mapped;
  };
  out.problem.set_objective(problem.sense(), map_terms(problem.objective()));

  using Key = std::tuple<std::vector<std::pair<VarId, std::string>>, int, std::string>;
  std::set<Key> seen;
  Problem scratch;
  for (const Constraint& c : problem.constraints()) {
    // merge terms the same way the problem does, then skip rows already present
    LinearExpr mapped = map_terms(c.terms);
    std::sort(mapped.begin(), mapped.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
    LinearExpr merged;
    for (Term& t : mapped) {
      if (!merged.empty() && merged.back().var == t.var) {
        merged.back().coef += t.coef;
      } else {
        merged.push_back(std::move(t));
      }
    }
    std::erase_if(merged, [](const Term& t) { return t.coef.is_zero(); });
    Key key;
    for (const Term& t : merged) std::get<0>(key).emplace_back(t.var, t.coef.str());
    std::get<1>(key) = static_cast<int>(c.relation);
    std::get<2>(key) = c.rhs.str();
    if (!seen.insert(std::move(key)).second) continue;
    out.problem.add_constraint(std::move(merged), c.relation, c.rhs, c.label);
  }
  return out;
}

}  // namespace cachecraft::lp
