#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "heatlab/diophantine.hpp"
#include "heatlab/errors.hpp"
#include "heatlab/linalg.hpp"
#include "heatlab/precision.hpp"
#include "heatlab/spectral.hpp"

namespace heatlab {

/// Storage precision for results that outlive the ladder.
using Wide = Float<1024>;

template <class Real>
struct Gramian {
  Matrix<Real> matrix;
  Real horizon;
  SpatialProfile where;
  Normalization normalization;
};

template <class Real>
Gramian<Real> build_gramian(const Real& T, const SpatialProfile& where, std::size_t N,
                            Normalization norm = Normalization::kInitialState) {
  return Gramian<Real>{gramian_matrix(T, where, N, norm), T, where, norm};
}

/// Smallest eigenpair of one truncated Gramian, after the precision ladder.
struct EigenPoint {
  Wide lambda_min = 0;
  std::vector<Wide> eigenvector;  // unit vector of the final-state form
  unsigned bits = 0;
  std::size_t N = 0;
};

struct ObservabilityResult {
  Wide lambda_min = 0;
  Wide sqrt_scale = 0;
  std::size_t N_used = 0;
  bool converged = false;
  double relative_change = 0;  // |C(N) - C(2N)| / C(2N)
  unsigned precision_bits = 0;
  Normalization normalization = Normalization::kFinalState;
  /// Initial datum attaining lambda_min: its state at time T is the unit
  /// eigenvector.
  FourierState<Wide> minimizing_vector;
};

struct LadderOptions {
  PrecisionLadder ladder = default_ladder();
  double tiny = 1e-20;          // escalate below this lambda_min
  double agreement = 1e-6;      // accept once two rungs agree to this
  bool cross_check = true;
};

namespace detail {

template <class Real>
EigenPoint smallest_eigen_at(double T, const SpatialProfile& where, std::size_t N) {
  const Matrix<Real> g = gramian_matrix(Real(T), where, N, Normalization::kFinalState);
  const auto eig = symmetric_eigen(g);
  EigenPoint p;
  p.lambda_min = static_cast<Wide>(eig.values[0]);
  p.eigenvector.resize(N);
  for (std::size_t i = 0; i < N; ++i) p.eigenvector[i] = static_cast<Wide>(eig.vectors(i, 0));
  p.bits = precision_bits<Real>();
  p.N = N;
  return p;
}

inline bool agree(const Wide& a, const Wide& b, double tol) {
  using std::abs;
  const Wide scale = std::max(abs(a), abs(b));
  if (scale == 0) return true;
  return abs(a - b) <= Wide(tol) * scale;
}

}  // namespace detail

/// lambda_min of the final-state Gramian (the constant in
/// int_0^T int_E u^2 >= C ||u(T)||^2), climbing the precision ladder.
///
/// A rung is abandoned when Jacobi fails, lambda_min is negative, or it is
/// below `tiny`. With cross_check the accepted rung must agree with the next
/// one, which catches graded matrices whose small eigenvalues are
/// ill-determined at the lower precision.
inline EigenPoint smallest_eigen(double T, const SpatialProfile& where, std::size_t N,
                                 const LadderOptions& opt = {}) {
  if (!(T > 0)) fail(ErrorKind::kNegativeTime, "obs_constant needs T > 0");
  if (opt.ladder.empty()) fail(ErrorKind::kInvalidArgument, "empty precision ladder");
  std::optional<EigenPoint> pending;
  std::string last_error = "no rung attempted";
  for (std::size_t i = 0; i < opt.ladder.size(); ++i) {
    EigenPoint p;
    try {
      p = with_bits(opt.ladder[i], [&]<class Real>() { return detail::smallest_eigen_at<Real>(T, where, N); });
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kPrecisionExhausted) throw;
      last_error = e.what();
      pending.reset();
      continue;
    }
    const bool last = i + 1 == opt.ladder.size();
    if (pending) {
      if (detail::agree(pending->lambda_min, p.lambda_min, opt.agreement)) return *pending;
      pending.reset();
    }
    const bool suspicious = p.lambda_min < 0 || p.lambda_min < Wide(opt.tiny);
    if (last) {
      if (p.lambda_min < 0) {
        // rounding below an exact zero (resonant direction)
        if (-p.lambda_min > Wide(1e-30)) fail(ErrorKind::kPrecisionExhausted, "negative lambda_min at top precision");
        p.lambda_min = 0;
      }
      return p;
    }
    if (suspicious) continue;
    if (!opt.cross_check) return p;
    pending = p;
  }
  fail(ErrorKind::kPrecisionExhausted, last_error);
}

/// Builds the ObservabilityResult for N from the eigenpairs at N and 2N.
inline ObservabilityResult make_result(double T, const EigenPoint& at_n, const EigenPoint& at_2n, double tol) {
  using std::abs;
  using std::exp;
  using std::sqrt;
  ObservabilityResult r;
  r.lambda_min = at_n.lambda_min;
  r.sqrt_scale = sqrt(r.lambda_min);
  r.N_used = at_n.N;
  r.precision_bits = at_n.bits;
  const Wide s2 = sqrt(at_2n.lambda_min);
  if (s2 > 0) {
    r.relative_change = static_cast<double>(abs(r.sqrt_scale - s2) / s2);
  } else {
    r.relative_change = r.sqrt_scale == 0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  r.converged = r.relative_change < tol;
  std::vector<Wide> mu(at_n.N);
  for (std::size_t n = 1; n <= at_n.N; ++n) mu[n - 1] = at_n.eigenvector[n - 1] * exp(eigenvalue<Wide>(n) * Wide(T));
  r.minimizing_vector = FourierState<Wide>(std::move(mu));
  return r;
}

/// Observability constant truncated to N modes, with the N vs 2N
/// convergence flag. The truncated value is an upper bound on the true one.
inline ObservabilityResult obs_constant(double T, const SpatialProfile& where, std::size_t N, double tol,
                                        const LadderOptions& opt = {}) {
  if (!(tol > 0)) fail(ErrorKind::kInvalidArgument, "obs_constant needs tol > 0");
  if (N < 1) fail(ErrorKind::kInvalidArgument, "obs_constant needs N >= 1");
  const EigenPoint a = smallest_eigen(T, where, N, opt);
  const EigenPoint b = smallest_eigen(T, where, 2 * N, opt);
  return make_result(T, a, b, tol);
}

/// Quadratic form of the Gramian at the single unit mode n.
template <class Real>
Real single_mode_upper_bound(const Real& T, const AnchorPoint& x0, double eps, std::size_t n,
                             Normalization norm = Normalization::kFinalState) {
  if (n < 1) fail(ErrorKind::kInvalidArgument, "single_mode_upper_bound needs n >= 1");
  const Real w = overlap_product<Real>(n, n, x0, eps);
  const Real rate = 2 * eigenvalue<Real>(n);
  const Real time = norm == Normalization::kInitialState ? T * one_minus_exp_over(rate * T)
                                                         : T * exp_minus_one_over(rate * T);
  return 2 * w * time;
}

struct WitnessPoint {
  unsigned long long n = 0;
  double eps = 0;    // theta_n
  double bound = 0;  // sqrt(2/3) eps^{1/2 + delta/(T+delta)}
};

/// Scales n <= N_max with |sin(n pi x0)| <= e^{-n^2 pi^2 (T+delta)}, one per
/// distinct theta_n, up to K of them.
inline std::vector<WitnessPoint> point2_witness(const AnchorPoint& x0, double T, double delta, std::size_t K,
                                                unsigned long long N_max) {
  using R = Float<256>;
  using std::abs;
  using std::exp;
  if (!(T > 0) || !(delta > 0)) fail(ErrorKind::kInvalidArgument, "point2_witness needs T > 0 and delta > 0");
  if (K < 1) fail(ErrorKind::kInvalidArgument, "point2_witness needs K >= 1");
  std::vector<WitnessPoint> out;
  std::vector<unsigned long long> resonant;
  const R x = x0.value<R>();
  const double exponent = 0.5 + delta / (T + delta);
  for (unsigned long long n = 2; n <= N_max && out.size() < K; ++n) {
    const auto red = x0.reduce<R>(BigInt(n));
    if (red.exact_zero) {
      resonant.push_back(n);
      continue;
    }
    const R s = sin(pi<R>() * abs(red.offset));
    if (!(s <= exp(-eigenvalue<R>(n) * R(T + delta)))) continue;
    const R th = abs(red.offset) / R(n);
    if (!(x - th > 0) || !(x + th < 1)) continue;
    const double eps = static_cast<double>(th);
    if (!(eps > 0)) continue;
    bool seen = false;
    for (const auto& w : out) seen = seen || w.eps == eps;
    if (seen) continue;
    out.push_back({n, eps, std::sqrt(2.0 / 3.0) * std::pow(eps, exponent)});
  }
  if (out.empty()) {
    std::string msg = "no scale n <= " + std::to_string(N_max) + " with |sin(n pi x0)| <= exp(-n^2 pi^2 (T+delta))";
    if (!resonant.empty()) {
      msg += "; resonant n rejected (theta_n = 0):";
      for (std::size_t i = 0; i < resonant.size() && i < 8; ++i) msg += " " + std::to_string(resonant[i]);
    }
    fail(ErrorKind::kNotApplicable, msg);
  }
  return out;
}

struct RateFit {
  double slope = 0;
  double intercept = 0;
  double residual = 0;  // RMS of the log residuals
  std::size_t points = 0;
};

/// Least squares of log C on log eps.
inline RateFit rate_fit(const std::vector<std::pair<double, double>>& sweep) {
  if (sweep.size() < 4) fail(ErrorKind::kInvalidArgument, "rate_fit needs at least 4 points");
  double sx = 0, sy = 0;
  for (const auto& [e, c] : sweep) {
    if (!(e > 0) || !(c > 0)) fail(ErrorKind::kInvalidArgument, "rate_fit needs positive values");
    sx += std::log(e);
    sy += std::log(c);
  }
  const double n = static_cast<double>(sweep.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& [e, c] : sweep) {
    const double dx = std::log(e) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(c) - my);
  }
  if (sxx == 0) fail(ErrorKind::kInvalidArgument, "rate_fit needs distinct eps values");
  RateFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (const auto& [e, c] : sweep) {
    const double r = std::log(c) - (f.intercept + f.slope * std::log(e));
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  f.points = sweep.size();
  return f;
}

}  // namespace heatlab
