#pragma once

// Sine-basis representation of the Dirichlet heat equation on (0,1):
// phi_n(x) = sqrt(2) sin(n pi x), lambda_n = n^2 pi^2.

#include <cstddef>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "heatlab/diophantine.hpp"
#include "heatlab/errors.hpp"
#include "heatlab/linalg.hpp"
#include "heatlab/precision.hpp"

namespace heatlab {

template <class Real>
Real eigenvalue(unsigned long long n) {
  if (n < 1) fail(ErrorKind::kInvalidArgument, "eigenvalue needs n >= 1");
  const Real nn = Real(n);
  return nn * nn * pi<Real>() * pi<Real>();
}

/// Truncated coefficients mu_1..mu_N in the orthonormal sine basis.
template <class Real>
class FourierState {
 public:
  FourierState() = default;
  explicit FourierState(std::vector<Real> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) fail(ErrorKind::kInvalidArgument, "FourierState needs N >= 1");
  }

  static FourierState zero(std::size_t n) { return FourierState(std::vector<Real>(n, Real(0))); }

  /// phi_k, 1-based.
  static FourierState mode(std::size_t n, std::size_t k) {
    if (k < 1 || k > n) fail(ErrorKind::kInvalidArgument, "mode index out of range");
    auto s = zero(n);
    s.coeffs_[k - 1] = 1;
    return s;
  }

  std::size_t truncation() const { return coeffs_.size(); }
  const std::vector<Real>& coeffs() const { return coeffs_; }
  const Real& operator[](std::size_t i) const { return coeffs_[i]; }

  Real norm_squared() const { return dot(coeffs_, coeffs_); }
  Real norm() const {
    using std::sqrt;
    return sqrt(norm_squared());
  }

  /// u(x) = sum mu_n sqrt(2) sin(n pi x).
  Real evaluate(const Real& x) const {
    using std::sin;
    using std::sqrt;
    Real s = 0;
    for (std::size_t n = 1; n <= coeffs_.size(); ++n) s += coeffs_[n - 1] * sin(Real(n) * pi<Real>() * x);
    return sqrt(Real(2)) * s;
  }

  template <class Other>
  FourierState<Other> cast() const {
    std::vector<Other> c;
    c.reserve(coeffs_.size());
    for (const auto& v : coeffs_) c.push_back(static_cast<Other>(v));
    return FourierState<Other>(std::move(c));
  }

 private:
  std::vector<Real> coeffs_;
};

/// Indicator of [x0 - eps, x0 + eps].
struct IntervalIndicator {
  AnchorPoint center;
  double eps;
};

struct DiracAt {
  AnchorPoint x0;
};

namespace detail {

inline void check_interval(const AnchorPoint& x0, double eps) {
  using R = Float<128>;
  if (!(eps > 0)) fail(ErrorKind::kInvalidInterval, "half-width must be positive");
  const R x = x0.value<R>();
  if (!(x - R(eps) > 0) || !(x + R(eps) < 1)) fail(ErrorKind::kInvalidInterval, "interval leaves (0,1)");
}

}  // namespace detail

class SpatialProfile {
 public:
  static SpatialProfile interval(AnchorPoint x0, double eps) {
    detail::check_interval(x0, eps);
    SpatialProfile p;
    p.v_ = IntervalIndicator{std::move(x0), eps};
    return p;
  }

  static SpatialProfile dirac(AnchorPoint x0) {
    SpatialProfile p;
    p.v_ = DiracAt{std::move(x0)};
    return p;
  }

  bool is_interval() const { return std::holds_alternative<IntervalIndicator>(v_); }
  bool is_dirac() const { return !is_interval(); }

  const AnchorPoint& x0() const {
    return is_interval() ? std::get<IntervalIndicator>(v_).center : std::get<DiracAt>(v_).x0;
  }

  double eps() const {
    if (!is_interval()) fail(ErrorKind::kInvalidArgument, "Dirac profile has no half-width");
    return std::get<IntervalIndicator>(v_).eps;
  }

  const std::variant<IntervalIndicator, DiracAt>& variant() const { return v_; }

 private:
  SpatialProfile() : v_(DiracAt{AnchorPoint::rational(1, 2)}) {}
  std::variant<IntervalIndicator, DiracAt> v_;
};

/// int_{x0-eps}^{x0+eps} sin(n pi x) dx.
template <class Real>
Real overlap_interval(unsigned long long n, const AnchorPoint& x0, double eps) {
  using std::sin;
  detail::check_interval(x0, eps);
  if (n < 1) fail(ErrorKind::kInvalidArgument, "overlap_interval needs n >= 1");
  const Real npi = Real(n) * pi<Real>();
  return 2 / npi * x0.sin_npi<Real>(BigInt(n)) * sin(npi * Real(eps));
}

/// Sines, cosines and sinc factors indexed by mode, shared by every entry of
/// a Gramian so the expensive reductions happen O(N) times.
template <class Real>
class ModeTable {
 public:
  ModeTable(const SpatialProfile& where, std::size_t n_max) : interval_(where.is_interval()) {
    const AnchorPoint& x0 = where.x0();
    sin_.resize(2 * n_max + 1);
    cos_.resize(2 * n_max + 1);
    sinc_.resize(2 * n_max + 1);
    if (interval_) eps_ = Real(where.eps());
    for (std::size_t k = 0; k <= 2 * n_max; ++k) {
      if (k >= 1 && k <= n_max) sin_[k] = x0.sin_npi<Real>(BigInt(k));
      if (interval_ && k < n_max) cos_[k] = x0.cos_npi<Real>(BigInt(k));
      if (interval_) sinc_[k] = sinc(Real(k) * pi<Real>() * eps_);
    }
  }

  const Real& sin_npi(std::size_t n) const { return sin_[n]; }

  /// int_E sin(m pi x) sin(n pi x) dx for intervals, sin(m pi x0) sin(n pi x0)
  /// for a point.
  Real overlap(std::size_t m, std::size_t n) const {
    if (!interval_) return sin_[m] * sin_[n];
    const std::size_t d = m > n ? m - n : n - m;
    const std::size_t s = m + n;
    const Real diff = sinc_difference(Real(d) * pi<Real>() * eps_, Real(s) * pi<Real>() * eps_);
    return eps_ * (2 * sin_[m] * sin_[n] * sinc_[s] + cos_[d] * diff);
  }

 private:
  bool interval_;
  Real eps_ = 0;
  std::vector<Real> sin_;
  std::vector<Real> cos_;
  std::vector<Real> sinc_;
};

template <class Real>
Real overlap_product(unsigned long long m, unsigned long long n, const AnchorPoint& x0, double eps) {
  if (m < 1 || n < 1) fail(ErrorKind::kInvalidArgument, "overlap_product needs m, n >= 1");
  const ModeTable<Real> table(SpatialProfile::interval(x0, eps), static_cast<std::size_t>(std::max(m, n)));
  return table.overlap(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
}

/// Whether the quadratic form weights the initial datum or the final state.
enum class Normalization { kInitialState, kFinalState };

/// Observation Gramian:
///   initial: G_mn = 2 W_mn (1 - e^{-(lm+ln)T}) / (lm+ln)
///   final:   G_mn = 2 W_mn (e^{(lm+ln)T} - 1) / (lm+ln)
/// with W the spatial overlap of sin(m pi x) sin(n pi x).
template <class Real>
Matrix<Real> gramian_matrix(const Real& T, const SpatialProfile& where, std::size_t N,
                            Normalization norm = Normalization::kInitialState) {
  if (!(T > 0)) fail(ErrorKind::kNegativeTime, "Gramian needs T > 0");
  if (N < 1) fail(ErrorKind::kInvalidArgument, "Gramian needs N >= 1");
  const ModeTable<Real> table(where, N);
  const Real pi2 = pi<Real>() * pi<Real>();
  Matrix<Real> g(N, N);
  for (std::size_t m = 1; m <= N; ++m) {
    for (std::size_t n = m; n <= N; ++n) {
      const Real rate = Real(m * m + n * n) * pi2;
      const Real time = norm == Normalization::kInitialState ? T * one_minus_exp_over(rate * T)
                                                             : T * exp_minus_one_over(rate * T);
      const Real v = 2 * table.overlap(m, n) * time;
      g(m - 1, n - 1) = v;
      g(n - 1, m - 1) = v;
    }
  }
  return g;
}

/// b_n = <profile, phi_n>.
template <class Real>
std::vector<Real> profile_coefficients(const SpatialProfile& where, std::size_t N) {
  using std::sqrt;
  std::vector<Real> b(N);
  const Real r2 = sqrt(Real(2));
  for (std::size_t n = 1; n <= N; ++n) {
    b[n - 1] = where.is_interval() ? r2 * overlap_interval<Real>(n, where.x0(), where.eps())
                                   : r2 * where.x0().sin_npi<Real>(BigInt(n));
  }
  return b;
}

/// f(t) = sum_k a_k e^{-lambda_k (T - t)}, or sum_k a_k e^{-lambda_k t} when
/// reversed.
template <class Real>
struct ExpSum {
  std::vector<Real> a;
  bool reversed = false;
};

/// Values of f on a uniform grid of [0, T] including both ends.
template <class Real>
struct Sampled {
  std::vector<Real> values;
};

/// Non-separated control f(t,x) = sum_n eta_n e^{-lambda_n (T - t)} phi_n(x)
/// restricted to the profile support.
template <class Real>
struct PerMode {
  std::vector<Real> eta;
};

/// Int_0^T (sum a_k e^{-l_k s})(sum a_j e^{-l_j s}) ds. Same value for both
/// orientations of an ExpSum.
template <class Real>
Real expsum_l2_squared(const std::vector<Real>& a, const Real& T) {
  const Real pi2 = pi<Real>() * pi<Real>();
  Real s = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j] == 0) continue;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (a[k] == 0) continue;
      const Real rate = Real((j + 1) * (j + 1) + (k + 1) * (k + 1)) * pi2;
      s += a[j] * a[k] * T * one_minus_exp_over(rate * T);
    }
  }
  return s;
}

/// Composite Simpson weights h/3 (1,4,2,...,4,1) on an odd number of points.
template <class Real>
Real simpson(const std::vector<Real>& f, const Real& h) {
  const std::size_t n = f.size();
  if (n < 3 || n % 2 == 0) fail(ErrorKind::kInvalidArgument, "Simpson needs an odd number (>= 3) of samples");
  Real s = f.front() + f.back();
  for (std::size_t i = 1; i + 1 < n; ++i) s += (i % 2 == 1 ? Real(4) : Real(2)) * f[i];
  return s * h / 3;
}

/// b(x) f(t) (or a per-mode field) on [0, T].
template <class Real>
class ScalarControl {
 public:
  using Signal = std::variant<ExpSum<Real>, Sampled<Real>, PerMode<Real>>;

  ScalarControl(SpatialProfile profile, Signal signal, Real horizon)
      : profile_(std::move(profile)), signal_(std::move(signal)), horizon_(std::move(horizon)) {
    if (!(horizon_ > 0)) fail(ErrorKind::kNegativeTime, "control horizon must be positive");
    if (const auto* s = std::get_if<Sampled<Real>>(&signal_)) {
      if (s->values.size() < 3 || s->values.size() % 2 == 0)
        fail(ErrorKind::kInvalidArgument, "sampled signal needs an odd number (>= 3) of samples");
    }
    if (std::holds_alternative<PerMode<Real>>(signal_) && !profile_.is_interval())
      fail(ErrorKind::kInvalidArgument, "per-mode controls need an interval profile");
    l2_norm_ = compute_l2_norm();
  }

  static ScalarControl zero(SpatialProfile profile, std::size_t N, Real horizon) {
    return ScalarControl(std::move(profile), ExpSum<Real>{std::vector<Real>(N, Real(0)), false}, std::move(horizon));
  }

  const SpatialProfile& profile() const { return profile_; }
  const Signal& signal() const { return signal_; }
  const Real& horizon() const { return horizon_; }
  const Real& l2_norm() const { return l2_norm_; }

  /// f(t) for separated signals; Sampled signals interpolate linearly.
  Real value(const Real& t) const {
    using std::exp;
    if (const auto* e = std::get_if<ExpSum<Real>>(&signal_)) {
      const Real s = e->reversed ? t : horizon_ - t;
      Real v = 0;
      for (std::size_t k = 0; k < e->a.size(); ++k) v += e->a[k] * exp(-eigenvalue<Real>(k + 1) * s);
      return v;
    }
    if (const auto* s = std::get_if<Sampled<Real>>(&signal_)) {
      const std::size_t steps = s->values.size() - 1;
      Real pos = t / horizon_ * Real(steps);
      if (pos <= 0) return s->values.front();
      if (pos >= Real(steps)) return s->values.back();
      const auto i = static_cast<std::size_t>(static_cast<long long>(pos));
      const Real w = pos - Real(i);
      return (1 - w) * s->values[i] + w * s->values[i + 1];
    }
    fail(ErrorKind::kInvalidArgument, "per-mode control has no scalar signal");
  }

  Real compute_l2_norm() const {
    using std::sqrt;
    if (const auto* e = std::get_if<ExpSum<Real>>(&signal_)) {
      const Real time = expsum_l2_squared(e->a, horizon_);
      return sqrt(time * profile_mass_squared());
    }
    if (const auto* s = std::get_if<Sampled<Real>>(&signal_)) {
      std::vector<Real> sq;
      sq.reserve(s->values.size());
      for (const auto& v : s->values) sq.push_back(v * v);
      const Real h = horizon_ / Real(s->values.size() - 1);
      return sqrt(simpson(sq, h) * profile_mass_squared());
    }
    const auto& eta = std::get<PerMode<Real>>(signal_).eta;
    const Real q = quadratic_form(gramian_matrix(horizon_, profile_, eta.size()), eta);
    return q > 0 ? Real(sqrt(q)) : Real(0);
  }

 private:
  /// int_0^1 b(x)^2 dx for intervals; 1 for a Dirac (norm taken over (0,T)).
  Real profile_mass_squared() const { return profile_.is_interval() ? Real(2 * profile_.eps()) : Real(1); }

  SpatialProfile profile_;
  Signal signal_;
  Real horizon_;
  Real l2_norm_ = 0;
};

template <class Real>
FourierState<Real> evolve_free(const FourierState<Real>& state, const Real& t) {
  using std::exp;
  if (t < 0) fail(ErrorKind::kNegativeTime, "evolve_free needs t >= 0");
  std::vector<Real> c(state.coeffs());
  for (std::size_t n = 0; n < c.size(); ++n) c[n] *= exp(-eigenvalue<Real>(n + 1) * t);
  return FourierState<Real>(std::move(c));
}

template <class Real>
struct ForcedEvolution {
  FourierState<Real> state;
  std::size_t quadrature_steps = 0;  // 0 for closed-form signals
  bool accuracy_warning = false;
};

/// Duhamel: mu_n(T) = mu_n e^{-l_n T} + b_n int_0^T e^{-l_n (T-s)} f(s) ds.
template <class Real>
ForcedEvolution<Real> evolve_forced(const FourierState<Real>& state, const ScalarControl<Real>& ctrl, const Real& T) {
  using std::abs;
  using std::exp;
  if (abs(ctrl.horizon() - T) > abs(T) * std::numeric_limits<Real>::epsilon() * 16)
    fail(ErrorKind::kHorizonMismatch, "control horizon differs from T");
  const std::size_t N = state.truncation();
  ForcedEvolution<Real> out;
  std::vector<Real> mu = evolve_free(state, T).coeffs();
  const Real pi2 = pi<Real>() * pi<Real>();

  if (const auto* pm = std::get_if<PerMode<Real>>(&ctrl.signal())) {
    const std::size_t M = std::max(N, pm->eta.size());
    const Matrix<Real> g = gramian_matrix(T, ctrl.profile(), M);
    for (std::size_t n = 0; n < N; ++n)
      for (std::size_t m = 0; m < pm->eta.size(); ++m) mu[n] += g(n, m) * pm->eta[m];
    out.state = FourierState<Real>(std::move(mu));
    return out;
  }

  const std::vector<Real> b = profile_coefficients<Real>(ctrl.profile(), N);
  if (const auto* e = std::get_if<ExpSum<Real>>(&ctrl.signal())) {
    for (std::size_t n = 1; n <= N; ++n) {
      if (b[n - 1] == 0) continue;
      Real acc = 0;
      for (std::size_t k = 1; k <= e->a.size(); ++k) {
        const Real& a = e->a[k - 1];
        if (a == 0) continue;
        if (!e->reversed) {
          acc += a * T * one_minus_exp_over(Real(n * n + k * k) * pi2 * T);
        } else {
          // int_0^T e^{-l_n (T-s)} e^{-l_k s} ds = e^{-l_n T} T (e^{(l_n-l_k)T} - 1)/((l_n-l_k)T)
          const Real diff = (Real(n * n) - Real(k * k)) * pi2 * T;
          acc += a * exp(-Real(n * n) * pi2 * T) * T * exp_minus_one_over(diff);
        }
      }
      mu[n - 1] += b[n - 1] * acc;
    }
    out.state = FourierState<Real>(std::move(mu));
    return out;
  }

  const auto& s = std::get<Sampled<Real>>(ctrl.signal());
  const std::size_t steps = s.values.size() - 1;
  const Real h = T / Real(steps);
  out.quadrature_steps = steps;
  // at least 10 samples per e-folding time 1/lambda_N of the fastest mode
  out.accuracy_warning = h * eigenvalue<Real>(N) > Real(1) / 10;
  std::vector<Real> integrand(s.values.size());
  for (std::size_t n = 1; n <= N; ++n) {
    if (b[n - 1] == 0) continue;
    const Real lam = eigenvalue<Real>(n);
    for (std::size_t i = 0; i <= steps; ++i) integrand[i] = exp(-lam * (T - h * Real(i))) * s.values[i];
    mu[n - 1] += b[n - 1] * simpson(integrand, h);
  }
  out.state = FourierState<Real>(std::move(mu));
  return out;
}

/// mu^T G mu with the initial-state Gramian of (T, where, N).
template <class Real>
Real observation_quadratic(const FourierState<Real>& state, const Real& T, const SpatialProfile& where) {
  return quadratic_form(gramian_matrix(T, where, state.truncation()), state.coeffs());
}

}  // namespace heatlab
