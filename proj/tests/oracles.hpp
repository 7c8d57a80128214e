#pragma once

// Test-only reference computations, independent of the closed forms in the
// library: adaptive quadrature and a finite-difference heat solver.

#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace heatlab::oracle {

template <class Real = double>
Real integrate(const std::function<Real(Real)>& f, Real a, Real b, Real tol = Real(1e-14)) {
  return boost::math::quadrature::gauss_kronrod<Real, 61>::integrate(f, a, b, 20, tol);
}

/// Fixed composite 20-point Gauss-Legendre rule: nodes and weights on [a, b].
struct Rule {
  std::vector<double> nodes, weights;

  double apply(const std::vector<double>& values) const {
    double s = 0;
    for (std::size_t i = 0; i < values.size(); ++i) s += weights[i] * values[i];
    return s;
  }
};

inline Rule composite_gauss(double a, double b, int panels) {
  using G = boost::math::quadrature::gauss<double, 20>;
  Rule r;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t i = 0; i < G::abscissa().size(); ++i) {
      const double x = G::abscissa()[i], w = G::weights()[i] * h / 2;
      r.nodes.push_back(mid + x * h / 2);
      r.weights.push_back(w);
      if (x != 0) {
        r.nodes.push_back(mid - x * h / 2);
        r.weights.push_back(w);
      }
    }
  }
  return r;
}

/// Crank-Nicolson for u_t = u_xx on (0,1) with zero Dirichlet data, M
/// interior nodes. Returns interior nodal values at time t.
inline std::vector<double> crank_nicolson(const std::function<double(double)>& u0, double t, int M, int steps) {
  const double h = 1.0 / (M + 1);
  const double dt = t / steps;
  const double r = dt / (h * h);
  std::vector<double> u(M);
  for (int i = 0; i < M; ++i) u[i] = u0((i + 1) * h);
  // (I + r/2 A) u^{k+1} = (I - r/2 A) u^k with A = tridiag(-1, 2, -1)
  const double diag = 1 + r, off = -r / 2;
  std::vector<double> c(M), d(M);
  for (int k = 0; k < steps; ++k) {
    for (int i = 0; i < M; ++i) {
      const double left = i > 0 ? u[i - 1] : 0.0;
      const double right = i + 1 < M ? u[i + 1] : 0.0;
      d[i] = (1 - r) * u[i] + r / 2 * (left + right);
    }
    // Thomas algorithm
    c[0] = off / diag;
    d[0] = d[0] / diag;
    for (int i = 1; i < M; ++i) {
      const double m = diag - off * c[i - 1];
      c[i] = off / m;
      d[i] = (d[i] - off * d[i - 1]) / m;
    }
    u[M - 1] = d[M - 1];
    for (int i = M - 2; i >= 0; --i) u[i] = d[i] - c[i] * u[i + 1];
  }
  return u;
}

/// <u, sqrt(2) sin(n pi x)> by the trapezoid rule on the interior nodes.
inline double project(const std::vector<double>& u, int n) {
  const int M = static_cast<int>(u.size());
  const double h = 1.0 / (M + 1);
  double s = 0;
  for (int i = 0; i < M; ++i) s += u[i] * std::sqrt(2.0) * std::sin(n * M_PI * (i + 1) * h);
  return s * h;
}

}  // namespace heatlab::oracle
