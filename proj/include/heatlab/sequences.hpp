#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "heatlab/diophantine.hpp"
#include "heatlab/errors.hpp"
#include "heatlab/precision.hpp"
#include "heatlab/spectral.hpp"

namespace heatlab {

struct EpsSequence {
  double delta = 0;
  double C_const = 0;
  std::vector<double> values;  // eps_0 > eps_1 > ...
  unsigned N_checked = 0;
  double margins = 0;          // min_{j, n} phi_n^j / (C eps_j e^{-n^2 pi^2 delta})
  std::uint64_t seed = 0;
  std::vector<unsigned> draws; // rejection-sampling draws used per level
  double eps0_max = 1.0;
};

/// C = (4 sum_{n>=1} (n+1) e^{-n^2 pi^2 delta})^{-1}.
inline double eps_sequence_constant(double delta) {
  if (!(delta > 0)) fail(ErrorKind::kInvalidArgument, "delta must be positive");
  long double s = 0;
  for (unsigned n = 1; n < 100000; ++n) {
    const long double term = (n + 1.0L) * std::exp(-static_cast<long double>(n) * n * M_PI * M_PI * delta);
    s += term;
    if (term < 1e-30L * s) break;
  }
  return static_cast<double>(1.0L / (4.0L * s));
}

/// dist(eps, Z/n), exact for a double eps.
inline double dist_to_fractions(double eps, unsigned n) {
  using R = Float<128>;
  const R x = R(eps) * R(n);
  const R frac = x - floor(x);
  const R d = frac < R(0.5) ? frac : R(1) - frac;
  return static_cast<double>(d / R(n));
}

namespace detail {

/// Uniform double in [0,1) from the top 53 bits, identical on every platform.
inline double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

/// Sequence eps_0 > eps_1 > ... with eps_{j+1} in [eps_j/2, eps_j] and
/// dist(eps_j, Z/n) >= C eps_j e^{-n^2 pi^2 delta} for n <= N_check.
/// Level 0 avoids radius C e^{-n^2 pi^2 delta} inside (0, eps0_max); level
/// j+1 avoids radius C eps_j e^{-n^2 pi^2 delta} inside (eps_j/2, eps_j).
inline EpsSequence construct_eps_sequence(double delta, unsigned J, unsigned N_check, std::uint64_t seed,
                                          double eps0_max = 1.0, unsigned budget = 10000) {
  if (!(delta > 0)) fail(ErrorKind::kInvalidArgument, "delta must be positive");
  if (J < 1) fail(ErrorKind::kInvalidArgument, "J must be at least 1");
  if (N_check < 1) fail(ErrorKind::kInvalidArgument, "N_check must be at least 1");
  if (!(eps0_max > 0) || eps0_max > 1) fail(ErrorKind::kInvalidArgument, "eps0_max must lie in (0, 1]");
  EpsSequence seq;
  seq.delta = delta;
  seq.C_const = eps_sequence_constant(delta);
  seq.N_checked = N_check;
  seq.seed = seed;
  seq.eps0_max = eps0_max;
  std::vector<double> weight(N_check + 1);
  for (unsigned n = 1; n <= N_check; ++n) weight[n] = seq.C_const * std::exp(-double(n) * n * M_PI * M_PI * delta);

  std::mt19937_64 rng(seed);
  double lo = 0, hi = eps0_max, scale = 1.0;
  for (unsigned j = 0; j < J; ++j) {
    bool accepted = false;
    unsigned draws = 0;
    double excluded = 0;
    while (draws < budget && !accepted) {
      ++draws;
      const double u = detail::unit_draw(rng);
      const double eps = lo + (hi - lo) * u;
      if (!(eps > lo) || !(eps < hi)) continue;
      accepted = true;
      for (unsigned n = 1; n <= N_check && accepted; ++n)
        if (dist_to_fractions(eps, n) < scale * weight[n]) accepted = false;
      if (accepted) seq.values.push_back(eps);
      else excluded += 1;
    }
    seq.draws.push_back(draws);
    if (!accepted) {
      fail(ErrorKind::kConstructionFailed,
           "level " + std::to_string(j) + ": " + std::to_string(budget) + " draws rejected in (" + std::to_string(lo) +
               ", " + std::to_string(hi) + "); rejected fraction " + std::to_string(excluded / draws));
    }
    const double e = seq.values.back();
    lo = e / 2;
    hi = e;
    scale = e;
  }
  double margin = std::numeric_limits<double>::infinity();
  for (double e : seq.values)
    for (unsigned n = 1; n <= N_check; ++n) margin = std::min(margin, dist_to_fractions(e, n) / (e * weight[n]));
  seq.margins = margin;
  return seq;
}

struct IneqsinCheck {
  double min_ratio = 0;
  std::size_t witness_j = 0;
  unsigned witness_n = 0;
  std::vector<unsigned> skipped_resonant;
  std::size_t evaluated = 0;
};

/// min over (j, n) of |int_{x0-eps_j}^{x0+eps_j} sin(n pi x) dx| /
/// (eps_j |sin(n pi x0)| e^{-n^2 pi^2 delta}), skipping resonant n.
inline IneqsinCheck check_ineqsin(const AnchorPoint& x0, const EpsSequence& seq, unsigned n_min, unsigned n_max) {
  using R = Float<256>;
  using std::abs;
  using std::exp;
  if (n_min < 1 || n_max < n_min) fail(ErrorKind::kInvalidArgument, "invalid n range");
  for (double e : seq.values) detail::check_interval(x0, e);
  IneqsinCheck out;
  bool first = true;
  for (unsigned n = n_min; n <= n_max; ++n) {
    const R s = abs(x0.sin_npi<R>(BigInt(n)));
    if (s == 0) {
      out.skipped_resonant.push_back(n);
      continue;
    }
    const R damp = exp(-eigenvalue<R>(n) * R(seq.delta));
    for (std::size_t j = 0; j < seq.values.size(); ++j) {
      const R eps = R(seq.values[j]);
      const R ratio = abs(overlap_interval<R>(n, x0, seq.values[j])) / (eps * s * damp);
      const double r = static_cast<double>(ratio);
      ++out.evaluated;
      if (first || r < out.min_ratio) {
        out.min_ratio = r;
        out.witness_j = j;
        out.witness_n = n;
        first = false;
      }
    }
  }
  if (out.evaluated == 0) fail(ErrorKind::kEmptyGrid, "every n in range is resonant");
  return out;
}

}  // namespace heatlab
