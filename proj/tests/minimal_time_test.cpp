#include "heatlab/minimal_time.hpp"

#include <gtest/gtest.h>

namespace heatlab {
namespace {

using R = Float<256>;

double d(const R& v) { return static_cast<double>(v); }

const AnchorPoint kHalf = AnchorPoint::rational(1, 2);
const AnchorPoint kSqrt2m1 = AnchorPoint::quadratic(-1, 1, 2, 1);

GTEST_TEST(DoleckiTest, ResonanceAtHalf) {
  const auto s = dolecki_partial_sum(kHalf, R(1), 2);
  ASSERT_TRUE(s.divergent_by_resonance());
  EXPECT_EQ(*s.resonant_n, 2u);
  EXPECT_TRUE(isinf(s.sum));
  EXPECT_EQ(series_test(kHalf, R(1), 2).verdict, SeriesVerdict::kResonant);
}

GTEST_TEST(DoleckiTest, FirstTermAndPartialSum) {
  const auto s = dolecki_partial_sum(kSqrt2m1, R("0.1"), 50);
  EXPECT_FALSE(s.divergent_by_resonance());
  ASSERT_EQ(s.terms.size(), 50u);
  EXPECT_LT(d(abs(s.terms[0] - R("0.3866654834399996002883890212718579999411"))), 1e-35);
  EXPECT_LT(d(abs(s.sum - R("0.4244600916713369677568331244920940203949"))), 1e-35);
  // beyond the first few modes the terms only shrink
  for (std::size_t i = 4; i < s.terms.size(); ++i) EXPECT_LT(s.terms[i], s.terms[i - 1]) << i + 1;
}

GTEST_TEST(DoleckiTest, TailIsNegligibleForQuadraticAnchors) {
  const auto a = dolecki_partial_sum(kSqrt2m1, R(1), 20);
  const auto b = dolecki_partial_sum(kSqrt2m1, R(1), 40);
  EXPECT_LT(d(abs(a.sum - b.sum)), 1e-30);
  EXPECT_EQ(series_test(kSqrt2m1, R(1), 20).verdict, SeriesVerdict::kConvergent);
}

GTEST_TEST(DoleckiTest, DecreasingInT) {
  R prev = dolecki_partial_sum(kSqrt2m1, R(0.01), 30).sum;
  for (double T : {0.02, 0.05, 0.1, 0.5, 1.0}) {
    const R cur = dolecki_partial_sum(kSqrt2m1, R(T), 30).sum;
    EXPECT_LT(cur, prev) << T;
    prev = cur;
  }
  EXPECT_THROW(dolecki_partial_sum(kSqrt2m1, R(0), 5), Error);
}

GTEST_TEST(DoleckiTest, ReflectionInvariant) {
  const auto x = AnchorPoint::quadratic(-2, 1, 7, 3);
  const auto a = dolecki_partial_sum(x, R(0.05), 40);
  const auto b = dolecki_partial_sum(x.reflected(), R(0.05), 40);
  EXPECT_EQ(a.sum, b.sum);
}

GTEST_TEST(SeriesTest, HugeResonantQuotientLooksDivergentAtSmallT) {
  // one enormous partial quotient makes sin(2 pi x0) tiny
  const auto x = AnchorPoint::liouville({2, BigInt("1000000000000000000000000000000000000000"), 1});
  EXPECT_EQ(series_test(x, R(0.1), 2).verdict, SeriesVerdict::kDivergent);
}

GTEST_TEST(EstimateT0Test, RationalIsInfinite) {
  const auto e = estimate_T0(kHalf, 100);
  EXPECT_TRUE(std::isinf(e.t0_lower));
  EXPECT_TRUE(std::isinf(e.t0_upper));
  EXPECT_EQ(e.method, "exact-rational");
  ASSERT_TRUE(e.resonant_n.has_value());
  EXPECT_EQ(*e.resonant_n, 2u);
  EXPECT_EQ(*estimate_T0(AnchorPoint::rational(3, 7), 10).resonant_n, 7u);
}

GTEST_TEST(EstimateT0Test, QuadraticAnchorTendsToZero) {
  const auto e = estimate_T0(kSqrt2m1, 1000);
  EXPECT_EQ(e.method, "limsup-window");
  EXPECT_LT(e.t0_lower, 1e-3);
  EXPECT_LE(e.t0_lower, e.t0_upper);
  ASSERT_EQ(e.per_n_exponents.size(), 1000u);
  // the exponents behave like log(n)/n^2 up to a bounded factor
  for (std::size_t n = 10; n <= 1000; n *= 10) {
    const double e_n = e.per_n_exponents[n - 1];
    EXPECT_LT(e_n, 2 * std::log(static_cast<double>(n)) / (n * n)) << n;
  }
}

GTEST_TEST(EstimateT0Test, ReflectionInvariant) {
  const auto a = estimate_T0(kSqrt2m1, 200);
  const auto b = estimate_T0(kSqrt2m1.reflected(), 200);
  EXPECT_EQ(a.per_n_exponents, b.per_n_exponents);
  EXPECT_EQ(a.t0_lower, b.t0_lower);
}

GTEST_TEST(LiouvilleTest, SingleScaleHitsTheTarget) {
  for (double target : {1.0, 0.5}) {
    const auto x = build_liouville_point(target, 1);
    const auto e = estimate_T0(x, 4);
    // the window [2, 4] contains the resonant scale q = 2
    EXPECT_GE(e.t0_lower, 0.8 * target) << target;
    EXPECT_LE(e.t0_lower, 1.2 * target) << target;
    EXPECT_NEAR(e.per_n_exponents[1], target, 0.05 * target);
  }
}

GTEST_TEST(LiouvilleTest, QuotientsFollowTheRecurrence) {
  const auto cf = liouville_quotients(0.01, 2);
  ASSERT_EQ(cf.size(), 3u);
  EXPECT_EQ(cf[0], 2);
  const auto x = AnchorPoint::liouville(cf);
  const auto back = continued_fraction(x, 3);
  for (std::size_t k = 0; k < cf.size(); ++k) EXPECT_EQ(back.quotients[k + 1], cf[k]);
}

GTEST_TEST(LiouvilleTest, ThirdScaleExceedsAnyPracticalPrecision) {
  try {
    build_liouville_point(1, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kPrecisionExhausted);
  }
}

GTEST_TEST(LiouvilleTest, RejectsDegenerateTargets) {
  EXPECT_THROW(build_liouville_point(0, 1), Error);
  EXPECT_THROW(build_liouville_point(-1, 1), Error);
  EXPECT_THROW(build_liouville_point(1, 0), Error);
}

}  // namespace
}  // namespace heatlab
