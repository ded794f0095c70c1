// Release gate: one PASS/FAIL line per acceptance criterion. Every comparison is exact
// rational equality or ordering (tolerance 0); fuzzing uses fixed seeds.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cachecraft/errors.hpp"
#include "cachecraft/formulas.hpp"
#include "cachecraft/model.hpp"
#include "cachecraft/scheme.hpp"
#include "cachecraft/solve.hpp"

using namespace cachecraft;

namespace {

Rational q(const char* s) { return Rational::parse(s); }

CacheInstance inst(std::vector<Rational> m) {
  int K = static_cast<int>(m.size());
  return CacheInstance{K, K, std::move(m)};
}

CapacityInstance cap(std::vector<Rational> C, Rational m_tot) {
  int K = static_cast<int>(C.size());
  return CapacityInstance{CacheInstance{K, K, {}}, std::move(C), std::move(m_tot)};
}

std::string show(const std::vector<Rational>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i].str();
  return out + "]";
}

// Outcome of one criterion: the first failure found, or a summary on success.
struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& what) {
    if (pass) detail = what;
    pass = false;
  }
  template <typename A, typename B>
  void expect_eq(const A& got, const B& want, const std::string& what) {
    if (!(got == want)) {
      std::ostringstream s;
      s << what << ": got " << got << ", expected " << want;
      fail(s.str());
    }
  }
};

// Fuzzed instance families, shared by several criteria.
struct Corpus {
  std::vector<CacheInstance> small;    // sum m <= 1
  std::vector<CacheInstance> large;    // sum m >= K-1
  std::vector<CacheInstance> general;  // m_k uniform on a 1/10 grid
  std::vector<CapacityInstance> capacity;  // m_tot <= 1

  Corpus() {
    std::mt19937_64 rng(20240611);
    auto pick = [&](long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); };
    for (int i = 0; i < 200; ++i) {
      int K = 2 + i % 4;
      std::vector<Rational> small_m, large_m;
      for (int k = 0; k < K; ++k) {
        small_m.push_back(Rational(pick(0, 20), 20L * K));
        large_m.push_back(1 - Rational(pick(0, 20), 20L * K));
      }
      small.push_back(inst(small_m));
      large.push_back(inst(large_m));
    }
    for (int i = 0; i < 100; ++i) {
      int K = 2 + i % 4;
      std::vector<Rational> m;
      for (int k = 0; k < K; ++k) m.push_back(Rational(pick(0, 10), 10));
      general.push_back(inst(m));
    }
    for (int i = 0; i < 100; ++i) {
      int K = 2 + i % 4;
      std::vector<Rational> C;
      for (int k = 0; k < K; ++k) C.push_back(Rational(pick(1, 10), 10));
      capacity.push_back(cap(C, Rational(pick(0, 12), 12)));
    }
  }
};

const Corpus& corpus() {
  static const Corpus c;
  return c;
}

// Reference plan for m = [2/5, 1/2, 3/5], sizes in units of 1/30.
model::Scheme reference_plan() {
  model::Scheme s{model::PlacementVector::zero(3), model::DeliveryPlan::zero(3)};
  auto r = [](int n) { return Rational(n, 30); };
  auto set = [](std::initializer_list<int> users) { return UserSet::of(users); };
  s.placement[set({1})] = r(7);
  s.placement[set({2})] = r(4);
  s.placement[set({3})] = r(4);
  s.placement[set({1, 2})] = r(1);
  s.placement[set({1, 3})] = r(4);
  s.placement[set({2, 3})] = r(10);
  s.delivery[set({1, 2})] = r(10);
  s.delivery.set_piece(set({1, 2}), set({2}), r(4));
  s.delivery.set_piece(set({1, 2}), set({2, 3}), r(6));
  s.delivery.set_piece(set({1, 2}), set({1}), r(7));
  s.delivery.set_piece(set({1, 2}), set({1, 3}), r(3));
  s.delivery[set({1, 3})] = r(7);
  s.delivery.set_piece(set({1, 3}), set({3}), r(4));
  s.delivery.set_piece(set({1, 3}), set({2, 3}), r(3));
  s.delivery.set_piece(set({1, 3}), set({1}), r(7));
  s.delivery[set({2, 3})] = r(4);
  s.delivery.set_piece(set({2, 3}), set({3}), r(4));
  s.delivery.set_piece(set({2, 3}), set({2}), r(4));
  s.delivery[set({1, 2, 3})] = r(1);
  s.delivery.set_piece(set({1, 2, 3}), set({2, 3}), r(1));
  s.delivery.set_piece(set({1, 2, 3}), set({1, 3}), r(1));
  s.delivery.set_piece(set({1, 2, 3}), set({1, 2}), r(1));
  return s;
}

// Three-user memory grid m1 <= m2 <= m3 with step 1/20.
std::vector<CacheInstance> three_user_grid() {
  std::vector<CacheInstance> out;
  for (int a = 0; a <= 20; ++a)
    for (int b = a; b <= 20; ++b)
      for (int c = b; c <= 20; ++c) out.push_back(inst({Rational(a, 20), Rational(b, 20), Rational(c, 20)}));
  return out;
}

Outcome mixed_memory_load() {
  Outcome o;
  Rational load = solve::solve_min_load(inst({q("2/5"), q("1/2"), q("7/10")})).load;
  o.expect_eq(load, q("7/10"), "solve_min_load");
  o.detail = o.pass ? "load 7/10" : o.detail;
  return o;
}

Outcome reference_plan_instance() {
  Outcome o;
  CacheInstance instance = inst({q("2/5"), q("1/2"), q("3/5")});
  o.expect_eq(solve::solve_min_load(instance).load, q("11/15"), "solve_min_load");
  model::Scheme plan = reference_plan();
  lp::FeasibilityReport report = model::check_scheme(instance, plan);
  if (!report.feasible()) o.fail("reference plan violates " + report.violations.front().label);
  o.expect_eq(report.objective, q("22/30"), "reference plan objective");
  scheme::MaterializedScheme ms = scheme::materialize(plan, instance);
  o.expect_eq(ms.P, std::int64_t{30}, "subpacketization");
  if (!scheme::simulate_and_decode(ms).passed()) o.fail("reference plan does not decode");
  if (o.pass) o.detail = "load 11/15, plan feasible with objective 22/30, P=30";
  return o;
}

Outcome three_user_exactness() {
  Outcome o;
  std::vector<CacheInstance> grid = three_user_grid();
  for (const CacheInstance& c : grid) {
    Rational closed = formulas::load_three_user(c).load;
    std::string at = "m=" + show(c.m);
    o.expect_eq(solve::solve_uncoded_lower_bound(c).value, closed, at + " uncoded bound vs closed form");
    o.expect_eq(solve::solve_min_load(c).load, closed, at + " solve_min_load vs closed form");
    if (!o.pass) return o;
  }
  o.detail = std::to_string(grid.size()) + " grid points, all three equal";
  return o;
}

Outcome regime_closed_forms() {
  Outcome o;
  for (const CacheInstance& c : corpus().small) {
    o.expect_eq(solve::solve_min_load(c).load, formulas::load_small_memory(c), "small memory m=" + show(c.m));
  }
  for (const CacheInstance& c : corpus().large) {
    o.expect_eq(solve::solve_min_load(c).load, formulas::load_large_memory(c), "large memory m=" + show(c.m));
  }
  if (o.pass) o.detail = "200 small-memory and 200 large-memory instances, K=2..5";
  return o;
}

Outcome allocation_cases() {
  Outcome o;
  struct Case {
    std::vector<Rational> C;
    Rational theta;
  };
  std::vector<Case> cases{{{q("1/5"), q("2/5"), q("1/2")}, q("25/6")},
                          {{q("3/10"), q("3/10"), q("3/5")}, q("10/3")},
                          {{q("1/5"), q("3/10"), q("3/5")}, q("25/6")}};
  for (std::size_t i = 0; i < cases.size(); ++i) {
    CapacityInstance instance = cap(cases[i].C, 1);
    std::string name = "case " + std::to_string(i + 1);
    solve::DctSolution best = solve::solve_min_dct(instance);
    o.expect_eq(best.dct, cases[i].theta, name + " solve_min_dct");
    o.expect_eq(formulas::dct_closed_form(instance).theta, best.dct, name + " closed form vs solver");
    if (i == 2) {
      o.expect_eq(show(best.m), show({q("1/2"), q("1/2"), 0}), name + " m*");
      o.expect_eq(formulas::dct_uniform(instance), q("40/9"), name + " dct_uniform");
    }
  }
  if (o.pass) o.detail = "theta* 25/6, 10/3, 25/6; m*=[1/2,1/2,0]; uniform 40/9";
  return o;
}

Outcome dct_closed_form_vs_lp() {
  Outcome o;
  for (const CapacityInstance& c : corpus().capacity) {
    o.expect_eq(formulas::dct_closed_form(c).theta, solve::solve_min_dct(c).dct,
                "C=" + show(c.C) + " m_tot=" + c.m_tot.str());
  }
  if (o.pass) o.detail = "100 capacity instances, K=2..5, m_tot<=1";
  return o;
}

Outcome bound_sandwich() {
  Outcome o;
  int count = 0;
  for (const auto* family : {&corpus().small, &corpus().large, &corpus().general}) {
    for (const CacheInstance& c : *family) {
      Rational amiri = formulas::bound_amiri(c);
      Rational cutset = formulas::bound_cutset(c);
      Rational uncoded = solve::solve_uncoded_lower_bound(c).value;
      Rational achievable = solve::solve_min_load(c).load;
      if (max(amiri, cutset) > uncoded) o.fail("general bounds exceed the uncoded bound at m=" + show(c.m));
      if (uncoded > achievable) o.fail("uncoded bound exceeds the optimum at m=" + show(c.m));
      ++count;
    }
  }
  if (o.pass) o.detail = std::to_string(count) + " instances";
  return o;
}

Outcome decodability() {
  Outcome o;
  int count = 0;
  auto check = [&](const model::Scheme& s, const CacheInstance& c, const std::vector<Rational>* C,
                   const std::string& source) {
    if (!o.pass) return;
    std::string at = source + " m=" + show(c.m);
    try {
      scheme::MaterializedScheme ms = scheme::materialize(s, c);
      scheme::SimulationReport report = scheme::simulate_and_decode(ms);
      if (!report.passed()) {
        for (const auto& u : report.users) {
          if (!u.pass) o.fail(at + ": user " + std::to_string(u.user) + " fails to decode");
        }
      }
      scheme::measure(ms, C ? std::optional<std::vector<Rational>>(*C) : std::nullopt);
    } catch (const Error& e) {
      o.fail(at + ": " + e.what());
    }
    ++count;
  };
  for (const CacheInstance& c : corpus().small) {
    check(solve::solve_min_load(c).scheme, c, nullptr, "solve_min_load");
    check(formulas::build_scheme_small_memory(c), c, nullptr, "small-memory constructor");
  }
  for (const CacheInstance& c : corpus().large) {
    check(solve::solve_min_load(c).scheme, c, nullptr, "solve_min_load");
    check(formulas::build_scheme_large_memory(c), c, nullptr, "large-memory constructor");
  }
  for (const CacheInstance& c : corpus().general) check(solve::solve_min_load(c).scheme, c, nullptr, "solve_min_load");
  std::vector<CacheInstance> grid = three_user_grid();
  for (std::size_t i = 0; i < grid.size(); i += 4) {
    check(formulas::build_scheme_three_user(grid[i]), grid[i], nullptr, "three-user constructor");
  }
  for (const CapacityInstance& c : corpus().capacity) {
    solve::DctSolution best = solve::solve_min_dct(c);
    check(best.scheme, CacheInstance{c.base.K, c.base.N, best.m}, &c.C, "solve_min_dct");
    formulas::AllocationResult closed = formulas::dct_closed_form(c);
    check(formulas::build_scheme_lemma1(c, closed.m_star), CacheInstance{c.base.K, c.base.N, closed.m_star}, &c.C,
          "pairwise constructor");
    solve::DctSolution fixed = solve::evaluate_dct(c, closed.m_star);
    check(fixed.scheme, CacheInstance{c.base.K, c.base.N, closed.m_star}, &c.C, "evaluate_dct");
  }
  if (o.pass && count < 500) o.fail("only " + std::to_string(count) + " schemes checked");
  if (o.pass) o.detail = std::to_string(count) + " schemes materialized and decoded";
  return o;
}

Outcome curve_shapes() {
  Outcome o;
  std::vector<Rational> spread{q("0.2"), q("0.4"), q("0.6"), q("0.6"), q("0.8"), q("0.8"), q("1")};
  for (int s = 1; s <= 14; ++s) {
    CapacityInstance c = cap(spread, Rational(s, 2));
    Rational star = solve::solve_min_dct(c).dct;
    Rational unif = formulas::dct_uniform_shared(c);
    std::string at = "spread m_tot=" + c.m_tot.str();
    if (star > unif) o.fail(at + ": theta* " + star.str() + " exceeds theta_unif " + unif.str());
    if (c.m_tot <= Rational(1)) o.expect_eq(star, unif, at + " theta* vs theta_unif");
  }
  std::vector<Rational> clustered{q("0.2"), q("0.2"), q("0.2"), q("0.5"), q("0.6"), q("0.7"), q("0.7")};
  for (int s = 1; s <= 13; ++s) {
    CapacityInstance c = cap(clustered, Rational(s, 2));
    std::vector<Rational> m = solve::solve_min_dct(c).m;
    bool grouped = m[0] == m[1] && m[1] == m[2] && m[3] == m[4] && m[4] == m[5] && m[5] == m[6];
    if (!grouped) o.fail("clustered m_tot=" + c.m_tot.str() + ": m*=" + show(m) + " breaks the {1,2,3} | {4..7} grouping");
  }
  if (o.pass) o.detail = "spread 14 budgets (equality for m_tot<=1), clustered 13 budgets grouped {1,2,3} | {4,5,6,7}";
  return o;
}

Outcome uniform_capacity_reduction() {
  Outcome o;
  for (const CacheInstance& c : corpus().general) {
    CapacityInstance unit{c, std::vector<Rational>(c.K, Rational(1)), Rational(c.K)};
    o.expect_eq(solve::evaluate_dct(unit, c.m).dct, solve::solve_min_load(c).load, "m=" + show(c.m));
  }
  if (o.pass) o.detail = "100 instances, K=2..5";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* title;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"load 7/10 at m=[2/5,1/2,7/10]", mixed_memory_load},
      {"load 11/15 at m=[2/5,1/2,3/5], reference plan feasible, P=30", reference_plan_instance},
      {"three-user closed form = uncoded bound = LP on the 1/20 grid", three_user_exactness},
      {"small- and large-memory closed forms = LP", regime_closed_forms},
      {"three-user allocation cases", allocation_cases},
      {"closed-form DCT = LP DCT for m_tot<=1", dct_closed_form_vs_lp},
      {"max(amiri, cutset) <= uncoded bound <= LP", bound_sandwich},
      {"every produced scheme decodes", decodability},
      {"DCT curve shapes for two seven-user capacity vectors", curve_shapes},
      {"C=1 DCT equals minimum load", uniform_capacity_reduction},
  };
  int failed = 0;
  std::printf("tolerance: exact rational comparison (0)\n");
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].run();
    } catch (const std::exception& e) {
      outcome.fail(std::string("exception: ") + e.what());
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !outcome.pass;
    std::printf("criterion %2zu: %s  %s (%s) [%.1fs]\n", i + 1, outcome.pass ? "PASS" : "FAIL", criteria[i].title,
                outcome.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
