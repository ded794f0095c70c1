#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "cachecraft/errors.hpp"
#include "cachecraft/formulas.hpp"
#include "cachecraft/solve.hpp"
#include "oracles.hpp"

using namespace cachecraft;
using namespace cachecraft::solve;

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

void expect_feasible(const CacheInstance& instance, const model::Scheme& scheme) {
  lp::FeasibilityReport report = model::check_scheme(instance, scheme);
  for (const auto& v : report.violations) ADD_FAILURE() << "violated " << v.label << " by " << v.amount;
}

std::vector<Rational> random_memory(std::mt19937_64& rng, int K, long den) {
  std::vector<Rational> m;
  for (int k = 0; k < K; ++k) m.push_back(oracle::fraction(rng, den));
  return m;
}

}  // namespace

TEST(MinLoad, Examples) {
  CacheInstance motivating = inst({q("2/5"), q("1/2"), q("7/10")});
  LoadSolution a = solve_min_load(motivating);
  EXPECT_EQ(a.load, Rational(7, 10));
  EXPECT_EQ(a.scheme.load(), a.load);
  expect_feasible(motivating, a.scheme);

  CacheInstance example = inst({q("2/5"), q("1/2"), q("3/5")});
  LoadSolution b = solve_min_load(example);
  EXPECT_EQ(b.load, Rational(11, 15));
  expect_feasible(example, b.scheme);

  EXPECT_EQ(solve_min_load(inst({1, 1, 1, 1})).load, 0);
  EXPECT_EQ(solve_min_load(inst({0, 0, 0, 0})).load, 4);
  EXPECT_EQ(solve_min_load(inst({q("1/3")})).load, Rational(2, 3));
}

TEST(MinLoad, OptionsDoNotChangeTheOptimum) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 12; ++trial) {
    CacheInstance instance = inst(random_memory(rng, 2 + trial % 3, 6));
    Rational reference = solve_min_load(instance).load;
    SolverOptions full;
    full.formulation = model::Formulation::Full;
    full.exploit_symmetry = false;
    SolverOptions bland;
    bland.lp.rule = lp::PivotRule::Bland;
    LoadSolution f = solve_min_load(instance, full);
    LoadSolution b = solve_min_load(instance, bland);
    EXPECT_EQ(f.load, reference);
    EXPECT_EQ(b.load, reference);
    expect_feasible(instance, f.scheme);
    expect_feasible(instance, b.scheme);
  }
}

TEST(MinLoad, InspectSeesTheProgram) {
  SolverOptions options;
  std::size_t rows = 0;
  options.inspect = [&](const lp::Problem& p) { rows = p.num_constraints(); };
  solve_min_load(inst({q("1/5"), q("2/5")}), options);
  EXPECT_GT(rows, 0u);
}

TEST(MinLoad, SandwichedByUncodedBound) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    int K = 2 + trial % 5;
    CacheInstance instance = inst(random_memory(rng, K, 10));
    LoadSolution opt = solve_min_load(instance);
    BoundValue lb = solve_uncoded_lower_bound(instance);
    EXPECT_EQ(lb.kind, BoundKind::UncodedLB);
    EXPECT_LE(lb.value, opt.load);
    expect_feasible(instance, opt.scheme);
  }
}

TEST(MinLoad, PermutationAndMonotonicity) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    int K = 2 + trial % 3;
    std::vector<Rational> m = random_memory(rng, K, 10);
    Rational base = solve_min_load(inst(m)).load;
    std::vector<Rational> shuffled = m;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(solve_min_load(inst(shuffled)).load, base);
    std::vector<Rational> more = m;
    std::size_t k = rng() % K;
    more[k] = min(Rational(1), more[k] + Rational(1, 10));
    EXPECT_LE(solve_min_load(inst(more)).load, base);
  }
}

TEST(UncodedBound, Examples) {
  EXPECT_EQ(solve_uncoded_lower_bound(inst({q("2/5"), q("1/2"), q("7/10")})).value, Rational(7, 10));
  EXPECT_EQ(solve_uncoded_lower_bound(inst({0, 0, 0, 0})).value, 4);
  EXPECT_EQ(solve_uncoded_lower_bound(inst({q("1/10"), q("1/10"), q("1/10")})).value, Rational(12, 5));
  EXPECT_THROW(solve_uncoded_lower_bound(CacheInstance{9, 9, std::vector<Rational>(9, Rational(1, 2))}),
               ResourceLimitError);
}

TEST(MinDct, Examples) {
  DctSolution one = solve_min_dct(cap({q("1/5"), q("2/5"), q("1/2")}, 1));
  EXPECT_EQ(one.dct, Rational(25, 6));
  EXPECT_EQ(one.m, (std::vector<Rational>{Rational(1, 3), Rational(1, 3), Rational(1, 3)}));

  CapacityInstance three = cap({q("1/5"), q("3/10"), q("3/5")}, 1);
  DctSolution c = solve_min_dct(three);
  EXPECT_EQ(c.dct, Rational(25, 6));
  EXPECT_EQ(c.m, (std::vector<Rational>{Rational(1, 2), Rational(1, 2), 0}));
  EXPECT_EQ(c.scheme.completion_time(three.C), c.dct);

  DctSolution two = solve_min_dct(cap({q("3/10"), q("3/10"), q("3/5")}, 1));
  EXPECT_EQ(two.dct, Rational(10, 3));
  EXPECT_EQ(two.dct.decimal(4), "3.3333");
}

TEST(MinDct, AllocationIsFeasibleAndMonotone) {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 8; ++trial) {
    int K = 2 + trial % 3;
    std::vector<Rational> C;
    for (int k = 0; k < K; ++k) C.push_back(Rational(1 + static_cast<long>(rng() % 10), 10));
    Rational previous;
    for (long step = 0; step <= 2 * K; ++step) {
      CapacityInstance instance = cap(C, Rational(step, 2));
      DctSolution s = solve_min_dct(instance);
      Rational used;
      for (const Rational& x : s.m) {
        EXPECT_GE(x, 0);
        EXPECT_LE(x, 1);
        used += x;
      }
      EXPECT_LE(used, instance.m_tot);
      EXPECT_EQ(s.scheme.completion_time(C), s.dct);
      expect_feasible(CacheInstance{K, K, s.m}, s.scheme);
      if (step > 0) EXPECT_LE(s.dct, previous);
      previous = s.dct;
    }
    EXPECT_EQ(previous, 0);
  }
}

TEST(EvaluateDct, Examples) {
  CapacityInstance ones = cap({1, 1, 1}, 3);
  EXPECT_EQ(evaluate_dct(ones, {q("2/5"), q("1/2"), q("3/5")}).dct, Rational(11, 15));
  CapacityInstance ex = cap({q("1/5"), q("2/5"), q("1/2")}, 1);
  DctSolution best = solve_min_dct(ex);
  EXPECT_EQ(evaluate_dct(ex, best.m).dct, best.dct);
  EXPECT_EQ(evaluate_dct(cap({q("1/5"), q("2/5"), q("1/2")}, 3), {1, 1, 1}).dct, 0);
}

TEST(EvaluateDct, UnitCapacitiesGiveTheLoad) {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 15; ++trial) {
    int K = 2 + trial % 3;
    std::vector<Rational> m = random_memory(rng, K, 8);
    CapacityInstance instance = cap(std::vector<Rational>(K, 1), K);
    DctSolution d = evaluate_dct(instance, m);
    EXPECT_EQ(d.dct, solve_min_load(inst(m)).load);
    EXPECT_EQ(d.m, m);
  }
}

TEST(BottleneckRates, MinimumOverEachSet) {
  std::vector<Rational> rates = bottleneck_rates({q("1/2"), q("1/5"), 1});
  ASSERT_EQ(rates.size(), 8u);
  EXPECT_EQ(rates[0b001], Rational(1, 2));
  EXPECT_EQ(rates[0b101], Rational(1, 2));
  EXPECT_EQ(rates[0b110], Rational(1, 5));
  EXPECT_EQ(rates[0b111], Rational(1, 5));
}

TEST(SevenUsers, SpreadCapacities) {
  // Larger instance: the joint allocation for m_tot = 1 matches the closed form.
  CapacityInstance instance =
      cap({q("0.2"), q("0.4"), q("0.6"), q("0.6"), q("0.8"), q("0.8"), 1}, 1);
  DctSolution s = solve_min_dct(instance);
  EXPECT_EQ(s.dct, formulas::dct_closed_form(instance).theta);
}
