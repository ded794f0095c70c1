#include "cachecraft/solve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cachecraft/errors.hpp"

namespace cachecraft::solve {
namespace {

constexpr int kMaxGenieUsers = 8;

using Generators = std::vector<std::vector<lp::VarId>>;

lp::Solution run(const lp::Problem& problem, const Generators& generators, const SolverOptions& options,
                 const char* what) {
  if (options.inspect) options.inspect(problem);
  auto check_status = [&](const lp::Solution& s) {
    if (!s.optimal()) {
      throw InternalError(std::string(what) + " program ended " + lp::to_string(s.status) +
                          "; it is always feasible and bounded");
    }
  };
  if (!options.exploit_symmetry || generators.empty()) {
    lp::Solution s = lp::solve(problem, options.lp);
    check_status(s);
    return s;
  }
  lp::SymmetryReduction reduction = lp::reduce_by_symmetry(problem, generators);
  lp::Solution s = lp::solve(reduction.problem, options.lp);
  check_status(s);
  s.values = reduction.expand(s.values);
  lp::FeasibilityReport report = lp::check_feasible(problem, s.values);
  if (!report.feasible()) throw InternalError("symmetric solution violates '" + report.violations.front().label + "'");
  s.value = report.objective;
  s.tight_constraints.clear();
  return s;
}

// Transpositions (x y) of users whose keys are equal, consecutive within each class.
std::vector<std::pair<int, int>> interchangeable_users(const std::vector<std::vector<Rational>>& keys) {
  std::vector<std::pair<int, int>> out;
  const int K = static_cast<int>(keys.front().size());
  std::vector<char> done(static_cast<std::size_t>(K), 0);
  for (int x = 0; x < K; ++x) {
    if (done[x]) continue;
    int last = x;
    for (int y = x + 1; y < K; ++y) {
      bool same = true;
      for (const auto& key : keys) same = same && key[x] == key[y];
      if (!same) continue;
      out.emplace_back(last + 1, y + 1);
      done[y] = 1;
      last = y;
    }
  }
  return out;
}

UserSet swap_users(UserSet s, int x, int y) {
  if (s.contains(x) == s.contains(y)) return s;
  return s.contains(x) ? s.without(x).with(y) : s.without(y).with(x);
}

Generators user_generators(const lp::Problem& problem, const model::PlacementVars& pv, const model::DeliveryVars& dv,
                           const std::vector<lp::VarId>& memory, const std::vector<std::pair<int, int>>& pairs) {
  Generators out;
  for (auto [x, y] : pairs) {
    std::vector<lp::VarId> perm(problem.num_variables());
    std::iota(perm.begin(), perm.end(), lp::VarId{0});
    for (std::uint32_t s = 0; s < pv.a.size(); ++s) perm[pv.a[s]] = pv.a[swap_users(UserSet(s), x, y).mask()];
    for (std::uint32_t t = 1; t < dv.v.size(); ++t) perm[dv.v[t]] = dv.v[swap_users(UserSet(t), x, y).mask()];
    for (const auto& [key, var] : dv.u) {
      perm[var] = dv.u.at(model::PieceKey{swap_users(key.T, x, y), swap_users(key.S, x, y)});
    }
    if (!memory.empty()) std::swap(perm[memory[x - 1]], perm[memory[y - 1]]);
    out.push_back(std::move(perm));
  }
  return out;
}

void set_dct_objective(model::SchemeModel& model, const std::vector<Rational>& C) {
  std::vector<Rational> rate = bottleneck_rates(C);
  lp::LinearExpr objective;
  for (std::uint32_t t = 1; t < model.delivery.v.size(); ++t) objective.push_back({model.delivery.v[t], rate[t].reciprocal()});
  model.problem.set_objective(lp::Sense::Minimize, std::move(objective));
}

std::string ordering_label(const std::vector<int>& order) {
  std::string s = "genie:[";
  for (std::size_t i = 0; i < order.size(); ++i) s += (i ? "," : "") + std::to_string(order[i]);
  return s + "]";
}

}  // namespace

std::vector<Rational> bottleneck_rates(const std::vector<Rational>& C) {
  const int K = static_cast<int>(C.size());
  check_user_count(K);
  std::vector<Rational> rate(std::size_t{1} << K);
  for (std::uint32_t t = 1; t < rate.size(); ++t) {
    int low = std::countr_zero(t);
    UserSet rest = UserSet(t).without(low + 1);
    rate[t] = rest.empty() ? C[static_cast<std::size_t>(low)] : min(C[static_cast<std::size_t>(low)], rate[rest.mask()]);
  }
  return rate;
}

LoadSolution solve_min_load(const CacheInstance& inst, const SolverOptions& options) {
  validate_instance(inst);
  warn_if_large(inst.K);
  model::SchemeModel model = model::build_scheme_model(inst, options.formulation);
  Generators generators = user_generators(model.problem, model.placement, model.delivery, {},
                                          interchangeable_users({inst.m}));
  lp::Solution s = run(model.problem, generators, options, "minimum-load");
  LoadSolution out{s.value, model::read_scheme(model.placement, model.delivery, s.values)};
  if (out.scheme.load() != out.load) throw InternalError("extracted scheme load differs from the optimum");
  return out;
}

BoundValue solve_uncoded_lower_bound(const CacheInstance& inst, const SolverOptions& options) {
  validate_instance(inst);
  const int K = inst.K;
  if (K > kMaxGenieUsers) {
    throw ResourceLimitError("uncoded lower bound needs one row per user ordering (K! rows for K=" +
                             std::to_string(K) + "); supported up to K=" + std::to_string(kMaxGenieUsers));
  }
  lp::Problem problem;
  model::PlacementVars pv = model::build_placement_rows(inst, problem);
  lp::VarId R = problem.add_variable("R");
  problem.set_objective(lp::Sense::Minimize, {{R, 1}});
  const std::uint32_t n = std::uint32_t{1} << K;
  const std::uint32_t full = n - 1;

  // genie row for ordering q: R - sum_j sum_{S disjoint from {q_1..q_j}} a_S >= 0
  auto add_row = [&](const std::vector<int>& order) {
    std::uint32_t seen = 0;
    lp::LinearExpr expr{{R, 1}};
    std::vector<int> weight(n, 0);
    for (int q : order) {
      seen |= 1u << (q - 1);
      for (std::uint32_t s = 0; s < n; ++s) {
        if ((s & seen) == 0) ++weight[s];
      }
    }
    for (std::uint32_t s = 0; s < n; ++s) {
      if (weight[s] != 0) expr.push_back({pv.a[s], -weight[s]});
    }
    problem.add_constraint(std::move(expr), lp::Relation::GreaterEqual, 0, ordering_label(order));
  };

  std::vector<int> identity(static_cast<std::size_t>(K));
  std::iota(identity.begin(), identity.end(), 1);
  add_row(identity);
  while (true) {
    lp::Solution s = lp::solve(problem, options.lp);
    if (!s.optimal()) throw InternalError("uncoded lower bound program ended " + std::string(lp::to_string(s.status)));
    // g[U] = sum of a_S over S inside U
    std::vector<Rational> g(n);
    for (std::uint32_t m = 0; m < n; ++m) g[m] = s.values[pv.a[m]];
    for (int bit = 0; bit < K; ++bit) {
      for (std::uint32_t m = 0; m < n; ++m) {
        if (m & (1u << bit)) g[m] += g[m ^ (1u << bit)];
      }
    }
    std::vector<int> order = identity;
    std::vector<int> worst;
    Rational worst_value;
    do {
      Rational value;
      std::uint32_t seen = 0;
      for (int q : order) {
        seen |= 1u << (q - 1);
        value += g[full & ~seen];
      }
      if (worst.empty() || value > worst_value) {
        worst = order;
        worst_value = value;
      }
    } while (std::next_permutation(order.begin(), order.end()));
    if (worst_value <= s.values[R]) {
      if (options.inspect) options.inspect(problem);
      return BoundValue{s.value, BoundKind::UncodedLB};
    }
    add_row(worst);
  }
}

DctSolution solve_min_dct(const CapacityInstance& inst, const SolverOptions& options) {
  validate_instance(inst);
  const int K = inst.base.K;
  warn_if_large(K);
  model::SchemeModel model;
  std::vector<lp::VarId> memory;
  for (int k = 1; k <= K; ++k) memory.push_back(model.problem.add_variable("m[" + std::to_string(k) + "]", Rational(0), Rational(1)));
  model.placement = model::build_placement_rows(K, memory, model.problem);
  model.delivery = model::build_delivery_rows(K, model.problem, model.placement, options.formulation);
  lp::LinearExpr budget;
  for (lp::VarId id : memory) budget.push_back({id, 1});
  model.problem.add_constraint(std::move(budget), lp::Relation::LessEqual, inst.m_tot, "budget");
  set_dct_objective(model, inst.C);
  Generators generators = user_generators(model.problem, model.placement, model.delivery, memory,
                                          interchangeable_users({inst.C}));
  lp::Solution s = run(model.problem, generators, options, "allocation");
  DctSolution out{s.value, {}, model::read_scheme(model.placement, model.delivery, s.values)};
  for (lp::VarId id : memory) out.m.push_back(s.values[id]);
  return out;
}

DctSolution evaluate_dct(const CapacityInstance& inst, const std::vector<Rational>& m, const SolverOptions& options) {
  CacheInstance fixed{inst.base.K, inst.base.N, m};
  validate_instance(fixed);
  CapacityInstance check = inst;
  check.base.m.clear();
  validate_instance(check);
  warn_if_large(fixed.K);
  model::SchemeModel model = model::build_scheme_model(fixed, options.formulation);
  set_dct_objective(model, inst.C);
  Generators generators = user_generators(model.problem, model.placement, model.delivery, {},
                                          interchangeable_users({m, inst.C}));
  lp::Solution s = run(model.problem, generators, options, "completion-time");
  return DctSolution{s.value, m, model::read_scheme(model.placement, model.delivery, s.values)};
}

}  // namespace cachecraft::solve
