#pragma once

// Null controls for the truncated heat equation: moment-method controls built
// on a biorthogonal family to e^{-n^2 pi^2 t}, and minimal-norm (HUM)
// controls from the controllability Gramian.

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

/// psi_j(t) = sum_k coeff(j,k) e^{-lambda_k t} with int_0^T psi_j e^{-lambda_k t} = delta_jk.
template <class Real>
struct BiorthogonalFamily {
  Real horizon;
  std::size_t size = 0;
  Matrix<Real> gram;   // M_jk = int_0^T e^{-(lambda_j + lambda_k) t} dt
  Matrix<Real> coeff;  // M^{-1}
  std::vector<Real> norms;
  Real residual = 0;   // max |coeff M - I|
  Real condition_estimate = 0;
  unsigned bits = 0;

  Real psi(std::size_t j, const Real& t) const {
    using std::exp;
    Real v = 0;
    for (std::size_t k = 0; k < size; ++k) v += coeff(j - 1, k) * exp(-eigenvalue<Real>(k + 1) * t);
    return v;
  }
};

template <class Real>
Matrix<Real> exponential_gram(const Real& T, std::size_t N) {
  const Real pi2 = pi<Real>() * pi<Real>();
  Matrix<Real> m(N, N);
  for (std::size_t j = 1; j <= N; ++j)
    for (std::size_t k = 1; k <= N; ++k) m(j - 1, k - 1) = T * one_minus_exp_over(Real(j * j + k * k) * pi2 * T);
  return m;
}

/// Default biorthogonality tolerance 10^{-bits/8}.
template <class Real>
Real default_family_tolerance() {
  using std::pow;
  return pow(Real(10), -static_cast<int>(precision_bits<Real>() / 8));
}

template <class Real>
BiorthogonalFamily<Real> biorthogonal_family(const Real& T, std::size_t N,
                                             std::optional<Real> tolerance = std::nullopt) {
  using std::abs;
  using std::sqrt;
  if (!(T > 0)) fail(ErrorKind::kNegativeTime, "biorthogonal_family needs T > 0");
  if (N < 1) fail(ErrorKind::kInvalidArgument, "biorthogonal_family needs N >= 1");
  BiorthogonalFamily<Real> f;
  f.horizon = T;
  f.size = N;
  f.bits = precision_bits<Real>();
  f.gram = exponential_gram(T, N);
  const FullPivotLU<Real> lu(f.gram);
  std::vector<Real> nodes(N);
  for (std::size_t k = 0; k < N; ++k) nodes[k] = eigenvalue<Real>(k + 1);
  f.condition_estimate = cauchy_condition(nodes, nodes);
  if (lu.singular())
    fail(ErrorKind::kPrecisionExhausted, "exponential Gram matrix singular at " + std::to_string(f.bits) + " bits");
  f.coeff = lu.inverse();
  const Matrix<Real> prod = f.coeff * f.gram;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      const Real d = abs(prod(i, j) - (i == j ? Real(1) : Real(0)));
      if (d > f.residual) f.residual = d;
    }
  f.norms.resize(N);
  for (std::size_t j = 0; j < N; ++j) {
    std::vector<Real> row(N);
    for (std::size_t k = 0; k < N; ++k) row[k] = f.coeff(j, k);
    const Real q = quadratic_form(f.gram, row);
    f.norms[j] = q > 0 ? Real(sqrt(q)) : Real(0);
  }
  const Real tol = tolerance ? *tolerance : default_family_tolerance<Real>();
  if (f.residual > tol) {
    fail(ErrorKind::kPrecisionExhausted,
         "biorthogonality defect " + static_cast<Real>(f.residual).str(6) + " above tolerance at " +
             std::to_string(f.bits) + " bits (Cauchy condition estimate " + f.condition_estimate.str(6) + ")");
  }
  return f;
}

/// Reference bound K n^2 prod_j (1 + n^2/j^2) / prod_{j != n} |1 - n^2/j^2|
/// in closed form: the products are sinh(pi n)/(pi n) and 1/2.
inline double fattorini_bound(unsigned n, double K = 1.0) {
  const double nn = static_cast<double>(n);
  return K * 2.0 * nn * std::sinh(M_PI * nn) / M_PI;
}

/// The same ratio with both products truncated at j <= terms.
inline double fattorini_product_ratio(unsigned n, unsigned terms) {
  const double nn = static_cast<double>(n);
  double log_num = 0, log_den = 0;
  for (unsigned j = 1; j <= terms; ++j) {
    const double r = nn * nn / (static_cast<double>(j) * j);
    log_num += std::log1p(r);
    if (j != n) log_den += std::log(std::abs(1.0 - r));
  }
  return std::exp(log_num - log_den);
}

template <class Real>
struct ControlReport {
  ScalarControl<Real> control;
  FourierState<Real> final_state;
  Real residual_norm = 0;                 // ||u(T)|| / ||u0||
  std::optional<Real> eps_half_norm;      // sqrt(eps) ||control||, interval profiles
  std::string method;                     // "moment" or "hum"
  std::size_t family_size = 0;
  Real family_residual = 0;
  unsigned bits = 0;
};

namespace detail {

template <class Real>
Real relative_residual(const FourierState<Real>& end, const FourierState<Real>& start) {
  const Real n0 = start.norm();
  if (n0 == 0) return end.norm() == 0 ? Real(0) : Real(end.norm());
  return end.norm() / n0;
}

template <class Real>
ControlReport<Real> simulate(const FourierState<Real>& u0, ScalarControl<Real> control, const Real& T,
                             std::string method) {
  using std::sqrt;
  auto sim = evolve_forced(u0, control, T);
  ControlReport<Real> r{std::move(control), std::move(sim.state)};
  r.residual_norm = relative_residual(r.final_state, u0);
  if (r.control.profile().is_interval()) r.eps_half_norm = sqrt(Real(r.control.profile().eps())) * r.control.l2_norm();
  r.method = std::move(method);
  r.bits = precision_bits<Real>();
  return r;
}

/// f(t) = -sum_n c_n psi_n(T - t) with c_n = mu_n e^{-lambda_n T} / b_n, as an
/// ExpSum in e^{-lambda_k (T - t)}.
template <class Real>
ControlReport<Real> moment_control(const FourierState<Real>& u0, const Real& T, SpatialProfile profile,
                                   const BiorthogonalFamily<Real>& family, ErrorKind vanishing) {
  using std::abs;
  using std::exp;
  const std::size_t N = u0.truncation();
  if (family.size < N) fail(ErrorKind::kInvalidArgument, "biorthogonal family smaller than the datum truncation");
  if (abs(family.horizon - T) > abs(T) * std::numeric_limits<Real>::epsilon() * 16)
    fail(ErrorKind::kHorizonMismatch, "family horizon differs from T");
  const std::vector<Real> b = profile_coefficients<Real>(profile, N);
  std::vector<Real> c(N, Real(0));
  for (std::size_t n = 0; n < N; ++n) {
    if (u0[n] == 0) continue;
    if (b[n] == 0)
      fail(vanishing, "mode " + std::to_string(n + 1) + " has a vanishing profile coefficient");
    c[n] = u0[n] * exp(-eigenvalue<Real>(n + 1) * T) / b[n];
  }
  std::vector<Real> a(family.size, Real(0));
  for (std::size_t k = 0; k < family.size; ++k) {
    Real s = 0;
    for (std::size_t n = 0; n < N; ++n) s += c[n] * family.coeff(n, k);
    a[k] = -s;
  }
  ScalarControl<Real> ctrl(std::move(profile), ExpSum<Real>{std::move(a), false}, T);
  auto r = simulate(u0, std::move(ctrl), T, "moment");
  r.family_size = family.size;
  r.family_residual = family.residual;
  return r;
}

}  // namespace detail

template <class Real>
ControlReport<Real> moment_control_interval(const FourierState<Real>& u0, const Real& T, const AnchorPoint& x0,
                                           double eps_prime, const BiorthogonalFamily<Real>& family) {
  return detail::moment_control(u0, T, SpatialProfile::interval(x0, eps_prime), family,
                                ErrorKind::kNotControllableByProfile);
}

template <class Real>
ControlReport<Real> moment_control_point(const FourierState<Real>& u0, const Real& T, const AnchorPoint& x0,
                                        const BiorthogonalFamily<Real>& family) {
  return detail::moment_control(u0, T, SpatialProfile::dirac(x0), family, ErrorKind::kNotPointwiseControllable);
}

/// Pads or cuts a state to N modes.
template <class Real>
FourierState<Real> resized(const FourierState<Real>& s, std::size_t N) {
  std::vector<Real> c(N, Real(0));
  for (std::size_t i = 0; i < std::min(N, s.truncation()); ++i) c[i] = s[i];
  return FourierState<Real>(std::move(c));
}

/// Adjoint coefficients eta of the minimal-norm control: G eta = -(mu_n e^{-lambda_n T}).
template <class Real>
std::vector<Real> hum_coefficients(const FourierState<Real>& u0, const Real& T, const SpatialProfile& where,
                                   std::size_t N) {
  using std::exp;
  using std::ldexp;
  if (!(T > 0)) fail(ErrorKind::kNegativeTime, "HUM needs T > 0");
  const Matrix<Real> g = gramian_matrix(T, where, N);
  const FullPivotLU<Real> lu(g);
  const Real floor = ldexp(Real(1), -static_cast<int>(precision_bits<Real>()) + 32);
  if (lu.singular() || lu.pivot_ratio() < floor) {
    fail(ErrorKind::kNotControllableInTruncation,
         "Gramian numerically singular at " + std::to_string(precision_bits<Real>()) + " bits (rank " +
             std::to_string(lu.rank()) + " of " + std::to_string(N) + ")");
  }
  const FourierState<Real> u = resized(u0, N);
  std::vector<Real> rhs(N);
  for (std::size_t n = 0; n < N; ++n) rhs[n] = -u[n] * exp(-eigenvalue<Real>(n + 1) * T);
  return lu.solve(rhs);
}

/// Builds the control for given adjoint coefficients: per-mode on intervals,
/// a scalar ExpSum with a_n = eta_n sqrt(2) sin(n pi x0) at a point.
template <class Real>
ScalarControl<Real> control_from_eta(const std::vector<Real>& eta, const Real& T, const SpatialProfile& where) {
  if (where.is_interval()) return ScalarControl<Real>(where, PerMode<Real>{eta}, T);
  const std::vector<Real> b = profile_coefficients<Real>(where, eta.size());
  std::vector<Real> a(eta.size());
  for (std::size_t n = 0; n < eta.size(); ++n) a[n] = eta[n] * b[n];
  return ScalarControl<Real>(where, ExpSum<Real>{std::move(a), false}, T);
}

template <class Real>
ControlReport<Real> hum_optimal_control(const FourierState<Real>& u0, const Real& T, const SpatialProfile& where,
                                        std::size_t N) {
  const std::vector<Real> eta = hum_coefficients(u0, T, where, N);
  return detail::simulate(resized(u0, N), control_from_eta(eta, T, where), T, "hum");
}

template <class Real>
struct BlowupRow {
  double eps = 0;
  std::optional<Real> eps_half_norm;
  std::optional<Real> residual;
  std::string error;
};

/// HUM control per eps on Interval(x0, eps); failures become table entries.
template <class Real>
std::vector<BlowupRow<Real>> blowup_diagnostic(const FourierState<Real>& u0, const Real& T, const AnchorPoint& x0,
                                               const std::vector<double>& eps_list) {
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1])) fail(ErrorKind::kInvalidArgument, "eps_list must be strictly decreasing");
  std::vector<BlowupRow<Real>> rows;
  for (double eps : eps_list) {
    BlowupRow<Real> row;
    row.eps = eps;
    try {
      const auto r = hum_optimal_control(u0, T, SpatialProfile::interval(x0, eps), u0.truncation());
      row.eps_half_norm = r.eps_half_norm;
      row.residual = r.residual_norm;
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

/// psi(t) = int_{x0-eps}^{x0+eps} control(y, t) dy as a scalar ExpSum signal.
template <class Real>
ExpSum<Real> rescale_and_average(const ScalarControl<Real>& ctrl, double delta) {
  using std::sqrt;
  const SpatialProfile& p = ctrl.profile();
  if (!p.is_interval()) fail(ErrorKind::kInvalidArgument, "rescale_and_average needs an interval control");
  detail::check_interval(p.x0(), delta);
  if (p.eps() > delta) fail(ErrorKind::kInvalidInterval, "control half-width exceeds delta");
  if (const auto* e = std::get_if<ExpSum<Real>>(&ctrl.signal())) {
    ExpSum<Real> out = *e;
    for (auto& a : out.a) a *= 2 * Real(p.eps());
    return out;
  }
  if (const auto* pm = std::get_if<PerMode<Real>>(&ctrl.signal())) {
    ExpSum<Real> out;
    const Real r2 = sqrt(Real(2));
    out.a.resize(pm->eta.size());
    for (std::size_t n = 0; n < pm->eta.size(); ++n)
      out.a[n] = pm->eta[n] * r2 * overlap_interval<Real>(n + 1, p.x0(), p.eps());
    return out;
  }
  fail(ErrorKind::kInvalidArgument, "rescale_and_average needs an ExpSum or per-mode control");
}

}  // namespace heatlab
