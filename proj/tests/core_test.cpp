#include <gtest/gtest.h>

#include <random>

#include "cachecraft/errors.hpp"
#include "cachecraft/instance.hpp"
#include "cachecraft/rational.hpp"
#include "cachecraft/user_set.hpp"

using namespace cachecraft;

namespace {

Rational q(const char* s) { return Rational::parse(s); }

std::vector<std::uint32_t> masks(const std::vector<UserSet>& sets) {
  std::vector<std::uint32_t> out;
  for (auto s : sets) out.push_back(s.mask());
  return out;
}

}  // namespace

TEST(Rational, CanonicalForm) {
  EXPECT_EQ(Rational(6, -4).str(), "-3/2");
  EXPECT_EQ(Rational(22, 30).str(), "11/15");
  EXPECT_EQ(Rational(0, -7).str(), "0");
  EXPECT_EQ(q("4/2").str(), "2");
  EXPECT_EQ(q("0.95"), Rational(19, 20));
  EXPECT_EQ(q("-1.5"), Rational(-3, 2));
  EXPECT_EQ(q(" 7 "), Rational(7));
  EXPECT_THROW(q("1/0"), ArgumentError);
  EXPECT_THROW(q("abc"), ArgumentError);
  EXPECT_THROW(q("1/-2"), ArgumentError);
  EXPECT_THROW(Rational(1, 0), ArgumentError);
}

TEST(Rational, Decimal) {
  EXPECT_EQ(Rational(25, 6).decimal(4), "4.1667");
  EXPECT_EQ(Rational(40, 9).decimal(6), "4.444444");
  EXPECT_EQ(Rational(-1, 8).decimal(2), "-0.13");
  EXPECT_EQ(Rational(1, 3).decimal(0), "0");
  EXPECT_EQ(Rational(-1, 1000).decimal(2), "0.00");
  EXPECT_EQ(Rational(7).decimal(3), "7.000");
}

TEST(Rational, OverflowSpillsToBigAndBack) {
  Rational big(std::numeric_limits<std::int64_t>::max());
  Rational sum = big + big;
  EXPECT_FALSE(sum.is_small());
  EXPECT_EQ(sum.str(), "18446744073709551614");
  Rational back = sum - big;
  EXPECT_TRUE(back.is_small());
  EXPECT_EQ(back, big);
  Rational tiny(1, std::numeric_limits<std::int64_t>::max());
  Rational product = tiny * tiny;
  EXPECT_FALSE(product.is_small());
  EXPECT_EQ(product * big * big, Rational(1));
  EXPECT_LT(product, tiny);
  EXPECT_GT(big * big, big);
  Rational min64(std::numeric_limits<std::int64_t>::min());
  EXPECT_FALSE(min64.is_small());
  EXPECT_EQ((min64 + Rational(1)).str(), "-9223372036854775807");
  EXPECT_TRUE((min64 + Rational(1)).is_small());
}

TEST(Rational, RandomizedRoundTrips) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> small(-1000, 1000);
  std::uniform_int_distribution<std::int64_t> wide(-(std::int64_t{1} << 62), std::int64_t{1} << 62);
  for (int i = 0; i < 5000; ++i) {
    auto draw = [&](bool w) {
      std::int64_t d = w ? wide(rng) : small(rng);
      if (d == 0) d = 1;
      return Rational(w ? wide(rng) : small(rng), d);
    };
    Rational a = draw(i % 3 == 0);
    Rational b = draw(i % 5 == 0);
    EXPECT_EQ((a + b) - b, a);
    if (!b.is_zero()) {
      EXPECT_EQ((a * b) / b, a);
    }
    EXPECT_EQ(a + b, Rational(a.to_mpq() + b.to_mpq()));
    EXPECT_EQ(a * b, Rational(a.to_mpq() * b.to_mpq()));
    EXPECT_EQ(a < b, a.to_mpq() < b.to_mpq());
    EXPECT_EQ(a == b, a.to_mpq() == b.to_mpq());
  }
}

TEST(UserSet, EnumerateNonempty) {
  auto sets = enumerate_subsets(2, [](UserSet s) { return !s.empty(); });
  ASSERT_EQ(sets.size(), 3u);
  EXPECT_EQ(sets[0], UserSet::of({1}));
  EXPECT_EQ(sets[1], UserSet::of({2}));
  EXPECT_EQ(sets[2], UserSet::of({1, 2}));
}

TEST(UserSet, EnumeratePairs) {
  auto sets = enumerate_subsets(3, [](UserSet s) { return s.size() == 2; });
  EXPECT_EQ(masks(sets), (std::vector<std::uint32_t>{UserSet::of({1, 2}).mask(), UserSet::of({1, 3}).mask(),
                                                      UserSet::of({2, 3}).mask()}));
}

TEST(UserSet, EnumerationIsBijectionOntoMasks) {
  for (int K = 1; K <= 10; ++K) {
    auto sets = enumerate_subsets(K);
    ASSERT_EQ(sets.size(), std::size_t{1} << K);
    for (std::size_t i = 0; i < sets.size(); ++i) EXPECT_EQ(sets[i].mask(), i);
  }
  EXPECT_THROW(enumerate_subsets(0), ValidationError);
  EXPECT_THROW(enumerate_subsets(17), ValidationError);
}

TEST(UserSet, BFamilyExamples) {
  EXPECT_EQ(masks(b_family(UserSet::of({1, 2}), 1, 3)),
            (std::vector<std::uint32_t>{UserSet::of({2}).mask(), UserSet::of({2, 3}).mask()}));
  EXPECT_EQ(masks(b_family(UserSet::of({1, 2, 3}), 2, 3)), (std::vector<std::uint32_t>{UserSet::of({1, 3}).mask()}));
  EXPECT_EQ(masks(b_family(UserSet::of({1}), 1, 3)),
            (std::vector<std::uint32_t>{0, UserSet::of({2}).mask(), UserSet::of({3}).mask(), UserSet::of({2, 3}).mask()}));
  EXPECT_THROW(b_family(UserSet::of({1, 2}), 3, 3), ArgumentError);
  EXPECT_THROW(b_family(UserSet(), 1, 3), ArgumentError);
}

TEST(UserSet, BFamilyProperty) {
  for (int K = 1; K <= 6; ++K) {
    for (UserSet T : enumerate_subsets(K, [](UserSet s) { return !s.empty(); })) {
      for (int j : T.users()) {
        auto family = b_family(T, j, K);
        ASSERT_EQ(family.size(), std::size_t{1} << (K - T.size()));
        for (std::size_t i = 0; i < family.size(); ++i) {
          EXPECT_FALSE(family[i].contains(j));
          EXPECT_TRUE(family[i].contains(T.without(j)));
          if (i > 0) EXPECT_LT(family[i - 1], family[i]);
        }
      }
    }
  }
}

TEST(UserSet, TextRoundTrip) {
  EXPECT_EQ(UserSet::of({1, 3}).str(), "[1,3]");
  EXPECT_EQ(UserSet().str(), "[]");
  EXPECT_EQ(UserSet::parse(" [ 3, 1 ] ", 3), UserSet::of({1, 3}));
  EXPECT_EQ(UserSet::parse("[]", 3), UserSet());
  EXPECT_THROW(UserSet::parse("[4]", 3), ArgumentError);
  EXPECT_THROW(UserSet::parse("[1,", 3), ArgumentError);
}

TEST(Instance, Validation) {
  CacheInstance ok{3, 3, {q("2/5"), q("1/2"), q("7/10")}};
  EXPECT_NO_THROW(validate_instance(ok));
  CacheInstance few_files{3, 2, {0, 0, 0}};
  EXPECT_THROW(validate_instance(few_files), ValidationError);
  CacheInstance too_much{2, 2, {q("3/2"), 0}};
  try {
    validate_instance(too_much);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("m_1=3/2"), std::string::npos);
  }
}

TEST(Instance, ValidationListsEveryProblem) {
  CapacityInstance bad{{3, 2, {}}, {q("1/5"), 0, q("-1")}, q("-1/2")};
  try {
    validate_instance(bad);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("N=2 < K=3"), std::string::npos);
    EXPECT_NE(msg.find("C_2=0"), std::string::npos);
    EXPECT_NE(msg.find("C_3=-1"), std::string::npos);
    EXPECT_NE(msg.find("m_tot=-1/2"), std::string::npos);
  }
}

TEST(Instance, AscendingOrderIsStable) {
  std::vector<Rational> v{q("1/2"), q("1/5"), q("1/2"), 0};
  EXPECT_EQ(ascending_order(v), (std::vector<std::size_t>{3, 1, 0, 2}));
}
