#include "heatlab/diophantine.hpp"

#include <gtest/gtest.h>

namespace heatlab {
namespace {

using R = Float<256>;

AnchorPoint sqrt2m1() { return AnchorPoint::quadratic(-1, 1, 2, 1); }

double d(const R& v) { return static_cast<double>(v); }

GTEST_TEST(AnchorPointTest, RationalIsReduced) {
  const auto x = AnchorPoint::rational(2, 6);
  EXPECT_EQ(std::get<Rational>(x.variant()).p, 1);
  EXPECT_EQ(std::get<Rational>(x.variant()).q, 3);
  EXPECT_THROW(AnchorPoint::rational(3, 2), Error);
  EXPECT_THROW(AnchorPoint::rational(0, 2), Error);
}

GTEST_TEST(AnchorPointTest, QuadraticRejectsSquaresAndOutOfRange) {
  EXPECT_THROW(AnchorPoint::quadratic(-1, 1, 4, 1), Error);
  EXPECT_THROW(AnchorPoint::quadratic(1, 1, 2, 1), Error);
  EXPECT_NEAR(d(sqrt2m1().value<R>()), std::sqrt(2.0) - 1, 2e-16);
}

GTEST_TEST(AnchorPointTest, LiouvilleRejectsZeroQuotients) {
  EXPECT_THROW(AnchorPoint::liouville({2, 0, 3}), Error);
  EXPECT_THROW(AnchorPoint::liouville({}), Error);
}

GTEST_TEST(ContinuedFractionTest, RationalTerminates) {
  const auto cf = continued_fraction(AnchorPoint::rational(1, 3), 5);
  ASSERT_EQ(cf.quotients.size(), 2u);
  EXPECT_EQ(cf.quotients[0], 0);
  EXPECT_EQ(cf.quotients[1], 3);
  EXPECT_TRUE(cf.terminated);
  EXPECT_EQ(cf.convergents[0], std::make_pair(BigInt(0), BigInt(1)));
  EXPECT_EQ(cf.convergents[1], std::make_pair(BigInt(1), BigInt(3)));
}

GTEST_TEST(ContinuedFractionTest, SqrtTwoMinusOneIsPeriodic) {
  const auto cf = continued_fraction(sqrt2m1(), 6);
  ASSERT_EQ(cf.quotients.size(), 7u);
  EXPECT_EQ(cf.quotients[0], 0);
  for (std::size_t k = 1; k < cf.quotients.size(); ++k) EXPECT_EQ(cf.quotients[k], 2);
  const std::vector<std::pair<int, int>> expected{{0, 1}, {1, 2}, {2, 5}, {5, 12}, {12, 29}};
  for (std::size_t k = 0; k < expected.size(); ++k) {
    EXPECT_EQ(cf.convergents[k].first, expected[k].first);
    EXPECT_EQ(cf.convergents[k].second, expected[k].second);
  }
  EXPECT_FALSE(cf.terminated);
}

GTEST_TEST(ContinuedFractionTest, OtherQuadraticsMatchKnownExpansions) {
  // (1 + sqrt 5)/2 - 1 = [0; 1, 1, 1, ...]
  const auto g = continued_fraction(AnchorPoint::quadratic(-1, 1, 5, 2), 8);
  for (std::size_t k = 1; k < g.quotients.size(); ++k) EXPECT_EQ(g.quotients[k], 1);
  // sqrt 3 - 1 = [0; 1, 2, 1, 2, ...]
  const auto s3 = continued_fraction(AnchorPoint::quadratic(-1, 1, 3, 1), 6);
  const std::vector<int> expected{0, 1, 2, 1, 2, 1, 2};
  for (std::size_t k = 0; k < expected.size(); ++k) EXPECT_EQ(s3.quotients[k], expected[k]);
  // (sqrt 7 - 2)/3 in (0,1); its expansion must reproduce the value
  const auto x = AnchorPoint::quadratic(-2, 1, 7, 3);
  const auto cf = continued_fraction(x, 20);
  for (const auto& [p, q] : cf.convergents) EXPECT_LT(abs(x.value<R>() - exact_ratio<R>(p, q)), 1 / (R(q) * R(q)));
}

GTEST_TEST(ContinuedFractionTest, LiouvilleEchoesItsQuotients) {
  const auto x = AnchorPoint::liouville({2, 10, 1000000});
  const auto cf = continued_fraction(x, 6);
  const std::vector<long> expected{0, 2, 10, 1000000, 1, 1, 1};
  ASSERT_EQ(cf.quotients.size(), expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) EXPECT_EQ(cf.quotients[k], expected[k]);
}

GTEST_TEST(ContinuedFractionTest, ConvergentsAreBestApproximations) {
  for (const auto& x : {sqrt2m1(), AnchorPoint::quadratic(-1, 1, 5, 2), AnchorPoint::liouville({3, 7, 15, 1, 292})}) {
    const auto cf = continued_fraction(x, 40);
    for (std::size_t k = 1; k < cf.convergents.size(); ++k) {
      const auto& [p, q] = cf.convergents[k];
      if (q > 10000) break;
      const R direct = abs(x.value<R>() - exact_ratio<R>(p, q));
      EXPECT_LT(d(abs(x.theta<R>(q) - direct)), 1e-60) << "q = " << q;
      // no smaller denominator does better
      for (BigInt m = 1; m < q; ++m) EXPECT_GE(x.theta<R>(m) * R(m), x.theta<R>(q) * R(q));
    }
  }
}

GTEST_TEST(ContinuedFractionTest, DecimalCertifiesOnlyWhatItCan) {
  const auto x = AnchorPoint::decimal("0.41421356237309504880", 256);
  const auto cf = continued_fraction(x, 10);
  for (std::size_t k = 1; k < cf.quotients.size(); ++k) EXPECT_EQ(cf.quotients[k], 2);
  try {
    continued_fraction(x, 60);
    FAIL() << "expected precision-exhausted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kPrecisionExhausted);
  }
}

GTEST_TEST(ThetaTest, SpecExamples) {
  const auto third = AnchorPoint::rational(1, 3);
  EXPECT_EQ(theta<R>(2, third), R(1) / 6);
  EXPECT_EQ(theta<R>(3, third), 0);
  EXPECT_NEAR(d(theta<R>(12, sqrt2m1())), 2.453104293571617864977942456968588e-3, 1e-18);
}

GTEST_TEST(ThetaTest, BoundedByHalfOverN) {
  for (const auto& x : {sqrt2m1(), AnchorPoint::rational(3, 7), AnchorPoint::liouville({2, 10, 1000})}) {
    const auto seq = theta_sequence<R>(x, 300);
    for (std::size_t i = 0; i < seq.values.size(); ++i) {
      const R n = R(i + 1);
      EXPECT_GE(seq.values[i], 0);
      EXPECT_LE(seq.values[i], 1 / (2 * n));
      EXPECT_NEAR(d(abs(x.value<R>() - exact_ratio<R>(seq.argmins[i], BigInt(i + 1)))), d(seq.values[i]), 1e-70);
    }
  }
}

GTEST_TEST(ThetaTest, ZeroExactlyAtMultiplesOfTheDenominator) {
  const auto x = AnchorPoint::rational(3, 7);
  for (unsigned n = 1; n <= 100; ++n) EXPECT_EQ(theta<R>(n, x) == 0, n % 7 == 0) << n;
  const auto seq = theta_sequence<R>(sqrt2m1(), 100);
  for (const auto& v : seq.values) EXPECT_GT(v, 0);
}

GTEST_TEST(AbsSinTest, SpecExamples) {
  const auto half = AnchorPoint::rational(1, 2);
  EXPECT_EQ(abs_sin_npi<R>(2, half), 0);
  EXPECT_EQ(abs_sin_npi<R>(1, half), 1);
  EXPECT_NEAR(d(abs_sin_npi<R>(12, sqrt2m1())), 0.09234808680334707418649942118083211757497, 1e-17);
}

GTEST_TEST(AbsSinTest, TwoSidedSineComparison) {
  for (const auto& x : {sqrt2m1(), AnchorPoint::rational(5, 11), AnchorPoint::liouville({4, 100, 3})}) {
    for (unsigned n = 1; n <= 500; ++n) {
      const R nt = R(n) * theta<R>(n, x);
      const R s = abs_sin_npi<R>(n, x);
      EXPECT_GE(s, 2 * nt * (1 - R(1e-60)));
      EXPECT_LE(s, pi<R>() * nt * (1 + R(1e-60)));
    }
  }
}

GTEST_TEST(AbsSinTest, RationalResonancesAreExactZeros) {
  const auto x = AnchorPoint::rational(2, 9);
  for (unsigned k = 1; k <= 50; ++k) EXPECT_EQ(abs_sin_npi<R>(9 * k, x), 0);
}

GTEST_TEST(AbsSinTest, HugeIndicesUseExactReduction) {
  // n = 10^40 is far beyond any floating product n * x0
  const BigInt n("10000000000000000000000000000000000000000");
  const auto x = sqrt2m1();
  const R s = x.abs_sin_npi<R>(n);
  const Float<1024> ref = abs(sin(pi<Float<1024>>() * static_cast<Float<1024>>(n) * x.value<Float<1024>>()));
  EXPECT_NEAR(d(s), static_cast<double>(ref), 1e-30);
  // the signed variant agrees in magnitude
  EXPECT_EQ(abs(x.sin_npi<R>(n)), s);
}

GTEST_TEST(AbsSinTest, DecimalRaisesWhenUncertified) {
  const auto x = AnchorPoint::decimal("0.4142135623730950488", 128);
  EXPECT_NO_THROW(x.abs_sin_npi<R>(BigInt(12)));
  try {
    x.abs_sin_npi<R>(BigInt("1000000000000000000000000"));
    FAIL() << "expected precision-exhausted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kPrecisionExhausted);
  }
}

GTEST_TEST(ReflectionTest, EveryVariantMapsToOneMinusX) {
  const std::vector<AnchorPoint> xs{AnchorPoint::rational(2, 7), sqrt2m1(), AnchorPoint::decimal("0.123456789012345678901234567890123456789", 256),
                                    AnchorPoint::liouville({2, 10, 5}), AnchorPoint::liouville({1, 4, 7})};
  for (const auto& x : xs) {
    const auto y = x.reflected();
    EXPECT_EQ(y.kind(), x.kind());
    EXPECT_LT(d(abs(x.value<R>() + y.value<R>() - 1)), 1e-70);
    for (unsigned n = 1; n <= 50; ++n) EXPECT_EQ(abs_sin_npi<R>(n, x), abs_sin_npi<R>(n, y));
  }
}

GTEST_TEST(LiouvilleBoundTest, SpecExamples) {
  const auto good = liouville_bound_check<R>(sqrt2m1(), 2, R(0.2), 100);
  EXPECT_TRUE(good.holds);
  EXPECT_GT(good.worst_ratio, R(0.2));
  EXPECT_FALSE(liouville_bound_check<R>(AnchorPoint::rational(1, 3), 2, R(1e-9), 3).holds);
  // quotient blow-up: theta_q q^5 < 1 at the convergent before the huge quotient
  const auto lv = AnchorPoint::liouville({2, BigInt("1000000000000000000000000000000"), 1});
  const auto bad = liouville_bound_check<R>(lv, 5, R(1), 10);
  EXPECT_FALSE(bad.holds);
  EXPECT_EQ(bad.worst_n, 2u);
}

}  // namespace
}  // namespace heatlab
