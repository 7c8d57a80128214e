#pragma once

// Series sum_n e^{-n^2 pi^2 T} / |sin(n pi x0)| and the minimal time T0 it
// defines, plus anchors built to have prescribed resonances.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "heatlab/diophantine.hpp"
#include "heatlab/errors.hpp"
#include "heatlab/precision.hpp"
#include "heatlab/spectral.hpp"

namespace heatlab {

template <class Real>
struct DoleckiSum {
  Real sum = 0;             // +inf when resonant
  std::vector<Real> terms;  // terms up to the first resonance
  std::optional<unsigned long long> resonant_n;

  bool divergent_by_resonance() const { return resonant_n.has_value(); }
};

template <class Real>
DoleckiSum<Real> dolecki_partial_sum(const AnchorPoint& x0, const Real& T, unsigned long long N) {
  using std::exp;
  if (!(T > 0)) fail(ErrorKind::kNegativeTime, "dolecki_partial_sum needs T > 0");
  if (N < 1) fail(ErrorKind::kInvalidArgument, "dolecki_partial_sum needs N >= 1");
  DoleckiSum<Real> out;
  out.terms.reserve(N);
  for (unsigned long long n = 1; n <= N; ++n) {
    const Real s = x0.abs_sin_npi<Real>(BigInt(n));
    if (s == 0) {
      out.resonant_n = n;
      out.sum = std::numeric_limits<Real>::infinity();
      return out;
    }
    out.terms.push_back(exp(-eigenvalue<Real>(n) * T) / s);
  }
  out.sum = pairwise_sum(out.terms);
  return out;
}

enum class SeriesVerdict { kConvergent, kDivergent, kResonant, kInconclusive };

inline std::string to_string(SeriesVerdict v) {
  switch (v) {
    case SeriesVerdict::kConvergent: return "convergent";
    case SeriesVerdict::kDivergent: return "divergent";
    case SeriesVerdict::kResonant: return "divergent-by-resonance";
    case SeriesVerdict::kInconclusive: return "inconclusive";
  }
  return "inconclusive";
}

template <class Real>
struct SeriesTest {
  SeriesVerdict verdict = SeriesVerdict::kInconclusive;
  Real partial_sum = 0;  // up to 2N
  Real tail_max = 0;     // largest term with N < n <= 2N
};

/// Compares the terms in (N, 2N] with the partial sum: negligible tail means
/// convergent, a tail term above 1 means divergent.
template <class Real>
SeriesTest<Real> series_test(const AnchorPoint& x0, const Real& T, unsigned long long N, double negligible = 1e-30) {
  SeriesTest<Real> out;
  const auto s = dolecki_partial_sum(x0, T, 2 * N);
  if (s.divergent_by_resonance()) {
    out.verdict = SeriesVerdict::kResonant;
    out.partial_sum = s.sum;
    return out;
  }
  out.partial_sum = s.sum;
  for (std::size_t i = N; i < s.terms.size(); ++i) out.tail_max = std::max(out.tail_max, s.terms[i]);
  if (out.tail_max < Real(negligible) * out.partial_sum) out.verdict = SeriesVerdict::kConvergent;
  else if (out.tail_max > 1) out.verdict = SeriesVerdict::kDivergent;
  return out;
}

struct MinimalTimeEstimate {
  double t0_lower = 0;
  double t0_upper = 0;
  std::string method;  // "limsup-window" or "exact-rational"
  std::pair<unsigned long long, unsigned long long> window{0, 0};
  std::vector<double> per_n_exponents;  // log(1/|sin(n pi x0)|) / (n^2 pi^2), n = 1..
  std::optional<unsigned long long> resonant_n;
};

/// Exponents log(1/|sin(n pi x0)|)/(n^2 pi^2) for n <= N_max. t0_lower is
/// their maximum over the window [N_max/2, N_max], t0_upper the maximum over
/// all n. Rational anchors give +inf.
inline MinimalTimeEstimate estimate_T0(const AnchorPoint& x0, unsigned long long N_max) {
  using R = Float<256>;
  using std::log;
  if (N_max < 2) fail(ErrorKind::kInvalidArgument, "estimate_T0 needs N_max >= 2");
  MinimalTimeEstimate est;
  est.window = {N_max / 2, N_max};
  if (x0.is_rational()) {
    est.method = "exact-rational";
    est.t0_lower = est.t0_upper = std::numeric_limits<double>::infinity();
    est.resonant_n = static_cast<unsigned long long>(x0.denominator());
    return est;
  }
  est.method = "limsup-window";
  est.per_n_exponents.reserve(N_max);
  double lower = 0, upper = 0;
  for (unsigned long long n = 1; n <= N_max; ++n) {
    const R s = x0.abs_sin_npi<R>(BigInt(n));
    const double e = static_cast<double>(-log(s) / eigenvalue<R>(n));
    est.per_n_exponents.push_back(e);
    upper = std::max(upper, e);
    if (n >= est.window.first) lower = std::max(lower, e);
  }
  est.t0_lower = lower;
  est.t0_upper = upper;
  return est;
}

/// Partial quotients [a_1, ..., a_{K+1}] with a_1 = 2 whose convergent
/// denominators q_1..q_K satisfy |sin(q_k pi x0)| ~ e^{-q_k^2 pi^2 T0}, from
/// theta_{q_k} ~ 1/(q_k q_{k+1}). Throws precision-exhausted once a quotient
/// would need more than max_bits bits.
inline std::vector<BigInt> liouville_quotients(double target_T0, unsigned K, unsigned max_bits = 4096) {
  using R = Float<1024>;
  using std::exp;
  if (!(target_T0 > 0) || target_T0 > 10) fail(ErrorKind::kInvalidArgument, "target T0 must lie in (0, 10]");
  if (K < 1) fail(ErrorKind::kInvalidArgument, "need at least one resonant scale");
  std::vector<BigInt> cf{2};
  BigInt q_prev = 1, q = 2;
  for (unsigned k = 1; k <= K; ++k) {
    // q_{k+1} = pi e^{q_k^2 pi^2 T0}
    const R qr = static_cast<R>(q);
    const R log2_next = (qr * qr * pi<R>() * pi<R>() * R(target_T0) + log(pi<R>())) / log(R(2));
    if (log2_next > R(max_bits)) {
      fail(ErrorKind::kPrecisionExhausted,
           "resonant scale " + std::to_string(k + 1) + " needs about " +
               static_cast<BigInt>(log2_next).str() + " bits (budget " + std::to_string(max_bits) + ")");
    }
    const R next = pi<R>() * exp(qr * qr * pi<R>() * pi<R>() * R(target_T0));
    BigInt a = static_cast<BigInt>(round((next - static_cast<R>(q_prev)) / qr));
    if (a < 1) a = 1;
    cf.push_back(a);
    const BigInt qn = a * q + q_prev;
    q_prev = q;
    q = qn;
  }
  return cf;
}

inline AnchorPoint build_liouville_point(double target_T0, unsigned K, unsigned max_bits = 4096) {
  return AnchorPoint::liouville(liouville_quotients(target_T0, K, max_bits));
}

}  // namespace heatlab
