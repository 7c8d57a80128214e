#include "heatlab/control.hpp"

#include <random>

#include <gtest/gtest.h>

#include "heatlab/observability.hpp"
#include "oracles.hpp"

namespace heatlab {
namespace {

using R = Float<256>;

double d(const R& v) { return static_cast<double>(v); }

const AnchorPoint kHalf = AnchorPoint::rational(1, 2);
const AnchorPoint kPoint3 = AnchorPoint::rational(3, 10);
const AnchorPoint kSqrt2m1 = AnchorPoint::quadratic(-1, 1, 2, 1);

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::kInvalidArgument;
}

GTEST_TEST(BiorthogonalTest, OneByOne) {
  const auto f = biorthogonal_family(R(1), 1);
  EXPECT_NEAR(d(f.coeff(0, 0)), 19.739208854986785640721422661411755898, 1e-13);
  const R t(0.3);
  EXPECT_EQ(f.psi(1, t), f.coeff(0, 0) * exp(-pi<R>() * pi<R>() * t));
}

GTEST_TEST(BiorthogonalTest, ResidualAndNorms) {
  const auto f = biorthogonal_family(R(1), 3);
  EXPECT_LE(d(f.residual), 1e-20);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_LT(d(abs(f.norms[j] * f.norms[j] / f.coeff(j, j) - 1)), 1e-10);
}

GTEST_TEST(BiorthogonalTest, BiorthogonalityByQuadrature) {
  const auto f = biorthogonal_family(R(1), 4);
  const auto rule = oracle::composite_gauss(0, 1, 40);
  for (std::size_t j = 1; j <= 4; ++j) {
    std::vector<double> psi;
    for (double t : rule.nodes) psi.push_back(d(f.psi(j, R(t))));
    for (std::size_t k = 1; k <= 4; ++k) {
      std::vector<double> v(psi.size());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = psi[i] * std::exp(-double(k * k) * M_PI * M_PI * rule.nodes[i]);
      EXPECT_NEAR(rule.apply(v), j == k ? 1.0 : 0.0, 1e-8) << j << " " << k;
    }
  }
}

GTEST_TEST(BiorthogonalTest, NormsGrowAtMostExponentially) {
  const auto f = biorthogonal_family(R(1), 10);
  // least squares line through log ||psi_n||, then its upper envelope
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t n = 1; n <= 10; ++n) {
    const double y = std::log(d(f.norms[n - 1]));
    sx += n;
    sy += y;
    sxx += double(n) * n;
    sxy += n * y;
  }
  const double slope = (10 * sxy - sx * sy) / (10 * sxx - sx * sx);
  EXPECT_GT(slope, 0);
  double lift = 0;
  for (std::size_t n = 1; n <= 10; ++n) lift = std::max(lift, std::log(d(f.norms[n - 1])) - slope * n);
  for (std::size_t n = 1; n <= 10; ++n) EXPECT_LE(std::log(d(f.norms[n - 1])), slope * n + lift + 1e-12);
}

GTEST_TEST(BiorthogonalTest, LowPrecisionIsReportedWithACondition) {
  using Low = Float<64>;
  try {
    biorthogonal_family(Low(1), 24);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kPrecisionExhausted);
    EXPECT_NE(std::string(e.what()).find("condition"), std::string::npos);
  }
  EXPECT_THROW(biorthogonal_family(R(0), 3), Error);
}

GTEST_TEST(FattoriniTest, ClosedFormMatchesTruncatedProducts) {
  for (unsigned n : {1u, 2u, 5u}) {
    const double ratio = fattorini_product_ratio(n, 200000) * n * n;
    EXPECT_NEAR(ratio / fattorini_bound(n), 1.0, 1e-3) << n;
  }
}

GTEST_TEST(MomentControlTest, ZeroDatumGivesZeroControl) {
  const auto fam = biorthogonal_family(R("0.5"), 4);
  const auto r = moment_control_interval(FourierState<R>::zero(4), R("0.5"), kPoint3, 0.1, fam);
  EXPECT_EQ(r.residual_norm, 0);
  EXPECT_EQ(r.control.l2_norm(), 0);
}

GTEST_TEST(MomentControlTest, IntervalDrivesFirstModeToZero) {
  const auto fam = biorthogonal_family(R("0.5"), 8);
  const auto r = moment_control_interval(FourierState<R>::mode(8, 1), R("0.5"), kPoint3, 0.1, fam);
  EXPECT_LE(d(r.residual_norm), 1e-6);
  EXPECT_EQ(r.method, "moment");
  EXPECT_EQ(r.family_size, 8u);
  ASSERT_TRUE(r.eps_half_norm.has_value());
  EXPECT_NEAR(d(*r.eps_half_norm), std::sqrt(0.1) * d(r.control.l2_norm()), 1e-12);
}

GTEST_TEST(MomentControlTest, VanishingOverlapIsNotControllable) {
  const auto fam = biorthogonal_family(R(1), 2);
  EXPECT_EQ(kind_of([&] { moment_control_interval(FourierState<R>::mode(2, 2), R(1), kHalf, 0.2, fam); }),
            ErrorKind::kNotControllableByProfile);
}

GTEST_TEST(MomentControlTest, PointControl) {
  const auto fam = biorthogonal_family(R(1), 4);
  EXPECT_EQ(kind_of([&] { moment_control_point(FourierState<R>::mode(2, 2), R(1), kHalf, fam); }),
            ErrorKind::kNotPointwiseControllable);
  const auto a = moment_control_point(FourierState<R>::mode(1, 1), R(1), kHalf, fam);
  EXPECT_LE(d(a.residual_norm), 1e-6);
  EXPECT_TRUE(isfinite(a.control.l2_norm()));
  EXPECT_FALSE(a.eps_half_norm.has_value());
  const auto b = moment_control_point(FourierState<R>(std::vector<R>{R(1), R(0), R(1)}), R(1), kSqrt2m1, fam);
  EXPECT_LE(d(b.residual_norm), 1e-6);
}

GTEST_TEST(MomentControlTest, FamilyMustMatch) {
  const auto fam = biorthogonal_family(R(1), 2);
  EXPECT_THROW(moment_control_point(FourierState<R>::mode(3, 1), R(1), kHalf, fam), Error);
  EXPECT_EQ(kind_of([&] { moment_control_point(FourierState<R>::mode(2, 1), R("0.5"), kHalf, fam); }),
            ErrorKind::kHorizonMismatch);
}

GTEST_TEST(HumTest, OneByOneClosedForm) {
  const auto where = SpatialProfile::dirac(kHalf);
  const auto eta = hum_coefficients(FourierState<R>::mode(1, 1), R(1), where, 1);
  const R g11 = gramian_matrix(R(1), where, 1)(0, 0);
  const R e = exp(-pi<R>() * pi<R>());
  EXPECT_LT(d(abs(eta[0] + e / g11)), 1e-60);
  const auto r = hum_optimal_control(FourierState<R>::mode(1, 1), R(1), where, 1);
  EXPECT_LT(d(abs(r.control.l2_norm() * r.control.l2_norm() / (e * e / g11) - 1)), 1e-40);
  EXPECT_LT(d(r.residual_norm), 1e-40);
}

GTEST_TEST(HumTest, ResonanceMakesTheGramianSingular) {
  EXPECT_EQ(kind_of([] { hum_optimal_control(FourierState<R>::mode(2, 2), R(1), SpatialProfile::dirac(kHalf), 2); }),
            ErrorKind::kNotControllableInTruncation);
}

GTEST_TEST(HumTest, DualityInequality) {
  const auto where = SpatialProfile::interval(kPoint3, 0.1);
  const auto obs = obs_constant(0.5, where, 16, 1);
  const double scale = static_cast<double>(obs.sqrt_scale);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<R> c(16);
    for (auto& v : c) v = R(g(rng));
    const FourierState<R> u0(c);
    const auto r = hum_optimal_control(u0, R("0.5"), where, 16);
    EXPECT_LE(d(r.control.l2_norm()), d(u0.norm()) / scale * (1 + 1e-6)) << trial;
    EXPECT_LE(d(r.residual_norm), 1e-6);
  }
}

GTEST_TEST(HumTest, OrthogonalToEveryNullControl) {
  // at a point the admissible controls are f + g with int_0^T g(s) e^{-lambda_n (T-s)} ds = 0
  // for every n <= N; the minimal norm f is L2-orthogonal to all such g
  const std::size_t N = 3;
  const double T = 0.5;
  const auto where = SpatialProfile::dirac(kSqrt2m1);
  const auto r = hum_optimal_control(FourierState<R>(std::vector<R>{R(1), R(-1), R(2)}), R("0.5"), where, N);
  EXPECT_LE(d(r.residual_norm), 1e-40);
  const auto rule = oracle::composite_gauss(0, T, 40);
  using Vec = std::vector<double>;
  auto inner = [&](const Vec& a, const Vec& b) {
    Vec p(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) p[i] = a[i] * b[i];
    return rule.apply(p);
  };
  auto remove = [&](Vec v, const Vec& u) {
    const double c = inner(v, u) / inner(u, u);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * u[i];
    return v;
  };
  // Gram-Schmidt on the constraint span
  std::vector<Vec> ortho;
  for (std::size_t n = 1; n <= N; ++n) {
    Vec v;
    for (double s : rule.nodes) v.push_back(std::exp(-double(n * n) * M_PI * M_PI * (T - s)));
    for (const auto& u : ortho) v = remove(v, u);
    ortho.push_back(v);
  }
  Vec f;
  for (double s : rule.nodes) f.push_back(d(r.control.value(R(s))));
  for (int k = 1; k <= 4; ++k) {
    Vec g;
    for (double s : rule.nodes) g.push_back(std::cos(k * M_PI * s / T) + 0.3 * s);
    for (const auto& u : ortho) g = remove(g, u);
    EXPECT_NEAR(inner(f, g), 0.0, 1e-9 * std::sqrt(inner(f, f) * inner(g, g))) << k;
  }
}

GTEST_TEST(BlowupTest, ResonantDatumBlowsUp) {
  const auto rows = blowup_diagnostic(FourierState<R>::mode(2, 2), R(1), kHalf, {0.125, 0.0625, 0.03125});
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_TRUE(rows[i].eps_half_norm.has_value()) << rows[i].error;
    EXPECT_GT(*rows[i].eps_half_norm, *rows[i - 1].eps_half_norm);
  }
  EXPECT_TRUE(blowup_diagnostic(FourierState<R>::mode(2, 2), R(1), kHalf, {}).empty());
  EXPECT_THROW(blowup_diagnostic(FourierState<R>::mode(2, 2), R(1), kHalf, {0.1, 0.2}), Error);
}

GTEST_TEST(BlowupTest, ErrorsBecomeRows) {
  const auto rows = blowup_diagnostic(FourierState<R>::mode(2, 2), R(1), kHalf, {0.7, 0.1});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_FALSE(rows[0].error.empty());
  EXPECT_FALSE(rows[0].eps_half_norm.has_value());
  EXPECT_TRUE(rows[1].eps_half_norm.has_value());
}

GTEST_TEST(RescaleTest, SeparatedControlScalesByTheMass) {
  const ScalarControl<R> c(SpatialProfile::interval(kPoint3, 0.05), ExpSum<R>{{R(1), R(-2)}, false}, R(1));
  const auto psi = rescale_and_average(c, 0.1);
  ASSERT_EQ(psi.a.size(), 2u);
  EXPECT_EQ(psi.a[0], R(0.1) * 1);
  EXPECT_EQ(psi.a[1], R(0.1) * -2);
  EXPECT_THROW(rescale_and_average(c, 0.01), Error);
  EXPECT_THROW(rescale_and_average(c, 0.35), Error);
}

GTEST_TEST(RescaleTest, HumSingleModeFormula) {
  const auto where = SpatialProfile::interval(kPoint3, 0.05);
  const auto r = hum_optimal_control(FourierState<R>::mode(1, 1), R(1), where, 1);
  const auto psi = rescale_and_average(r.control, 0.1);
  const auto eta = hum_coefficients(FourierState<R>::mode(1, 1), R(1), where, 1);
  EXPECT_EQ(psi.a[0], eta[0] * sqrt(R(2)) * overlap_interval<R>(1, kPoint3, 0.05));
  // the averaged signal is the spatial integral of the per-mode control
  const double t = 0.7;
  const double direct = oracle::integrate<double>(
      [&](double x) { return d(eta[0]) * std::exp(-M_PI * M_PI * (1 - t)) * std::sqrt(2.0) * std::sin(M_PI * x); },
      0.25, 0.35);
  const ScalarControl<R> as_signal(SpatialProfile::dirac(kPoint3), psi, R(1));
  EXPECT_NEAR(d(as_signal.value(R(t))), direct, 1e-14);
}

GTEST_TEST(RescaleTest, ZeroStaysZero) {
  const auto c = ScalarControl<R>::zero(SpatialProfile::interval(kPoint3, 0.05), 3, R(1));
  for (const auto& a : rescale_and_average(c, 0.1).a) EXPECT_EQ(a, 0);
}

GTEST_TEST(ControlDeterminismTest, RepeatedRunsAgreeBitForBit) {
  const auto where = SpatialProfile::interval(kSqrt2m1, 0.05);
  const FourierState<R> u0(std::vector<R>{R(1), R(0.5), R(-0.25), R(0.125)});
  const auto a = hum_optimal_control(u0, R("0.5"), where, 4);
  const auto b = hum_optimal_control(u0, R("0.5"), where, 4);
  EXPECT_EQ(a.control.l2_norm(), b.control.l2_norm());
  EXPECT_EQ(a.final_state.coeffs(), b.final_state.coeffs());
}

}  // namespace
}  // namespace heatlab
