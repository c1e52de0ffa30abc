#include <gtest/gtest.h>

#include "fchi/constructions.hpp"
#include "oracles.hpp"

using namespace fchi;

TEST(Binary, DigitRuleSmallCases) {
  auto c1 = binary_coloring(1);
  EXPECT_EQ(c1.n(), 2);
  EXPECT_EQ(c1.color_of(0, 1), 1);
  auto c2 = binary_coloring(2);
  for (auto [u, v] : std::vector<std::pair<int, int>>{{0, 2}, {0, 3}, {1, 2}, {1, 3}}) EXPECT_EQ(c2.color_of(u, v), 1);
  EXPECT_EQ(c2.color_of(0, 1), 2);
  EXPECT_EQ(c2.color_of(2, 3), 2);
  auto c3 = binary_coloring(3);
  EXPECT_EQ(c3.color_of(0, 4), 1);
  EXPECT_EQ(c3.color_of(2, 3), 3);
}

TEST(Binary, MatchesIndependentDigitRule) {
  for (int r = 1; r <= 6; ++r) {
    auto c = binary_coloring(r);
    for (int u = 0; u < c.n(); ++u)
      for (int v = u + 1; v < c.n(); ++v) ASSERT_EQ(c.color_of(u, v), oracle::digit_color(r, u, v));
  }
}

TEST(Binary, RangeErrors) {
  try {
    binary_coloring(7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooLarge);
  }
  EXPECT_THROW(binary_coloring(0), Error);
}

TEST(Binary, SelfSimilarPrefix) {
  for (int r = 2; r <= 6; ++r) {
    auto big = binary_coloring(r), small = binary_coloring(r - 1);
    int half = 1 << (r - 1);
    for (int u = 0; u < half; ++u)
      for (int v = u + 1; v < half; ++v) ASSERT_EQ(big.color_of(u, v), small.color_of(u, v) + 1);
  }
}

TEST(Binary, EveryClassIsBipartite) {
  for (int r = 1; r <= 6; ++r) {
    auto c = binary_coloring(r);
    for (int col = 1; col <= r; ++col) EXPECT_EQ(chromatic_number(c.color_class(col)), 2);
  }
}

TEST(Binary, UnionChromaticTable) {
  auto a = verify_binary_union_chromatic(2, 2);
  ASSERT_EQ(a.verified_at.size(), 1U);
  EXPECT_EQ(a.verified_at[0].value, 4);
  auto b = verify_binary_union_chromatic(3, 1);
  EXPECT_EQ(b.verified_at.size(), 3U);
  for (const auto& e : b.verified_at) EXPECT_EQ(e.value, 2);
  auto d = verify_binary_union_chromatic(4, 2);
  EXPECT_EQ(d.verified_at.size(), 6U);
  EXPECT_TRUE(d.passed());
  EXPECT_THROW(verify_binary_union_chromatic(3, 4), Error);
}

TEST(Binary, ChromaticPqForSmallR) {
  for (int r = 1; r <= 4; ++r)
    for (int q = 1; q <= r; ++q) {
      auto v = is_chromatic_pq_coloring(binary_coloring(r), (1 << q) + 1, q + 1);
      EXPECT_TRUE(v.holds) << r << " " << q;
    }
}

TEST(ProductBound, Values) {
  EXPECT_EQ(product_upper_bound(2, 5, 3), 5);  // ceil(2/2) = 1, tight against F_chi(2,5,3)
  EXPECT_EQ(product_upper_bound(3, 4, 3), 10);
  EXPECT_EQ(product_upper_bound(4, 3, 2), 17);
  try {
    product_upper_bound(200, 9, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Overflow);
  }
  EXPECT_THROW(product_upper_bound(2, 2, 2), Error);
}

TEST(Recurrence, Examples) {
  auto rep = check_recurrence({{{2, 2, 2}, 2}, {{2, 3, 3}, 3}});
  ASSERT_EQ(rep.verified_at.size(), 1U);
  EXPECT_EQ(rep.verified_at[0].bound, 4);
  EXPECT_TRUE(rep.passed());
  EXPECT_TRUE(check_recurrence({}).verified_at.empty());
  auto lit = check_recurrence({{{3, 2, 2}, 2}, {{3, 3, 3}, 3}});
  EXPECT_TRUE(lit.passed());
  EXPECT_EQ(lit.verified_at[0].bound, 6);
}

TEST(Recurrence, FlagsViolationsAndSkipsOneColor) {
  auto bad = check_recurrence({{{2, 2, 2}, 2}, {{2, 3, 3}, 9}});
  EXPECT_FALSE(bad.passed());
  auto one = check_recurrence({{{1, 2, 2}, 2}, {{1, 3, 3}, 3}});
  EXPECT_TRUE(one.verified_at.empty());
  EXPECT_EQ(one.skipped.size(), 1U);
}
