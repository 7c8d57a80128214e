#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/expm1.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "heatlab/errors.hpp"

namespace heatlab {

/// Binary floating point with exactly `Bits` mantissa bits.
template <unsigned Bits>
using Float = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<Bits, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;

using BigInt = boost::multiprecision::cpp_int;

inline constexpr std::array<unsigned, 4> kSupportedBits{128, 256, 512, 1024};

/// Ordered list of working precisions tried before giving up.
using PrecisionLadder = std::vector<unsigned>;

inline PrecisionLadder default_ladder() { return {128, 256, 512}; }

template <class Real>
constexpr unsigned precision_bits() {
  return static_cast<unsigned>(std::numeric_limits<Real>::digits);
}

template <class Real>
Real pi() {
  return boost::math::constants::pi<Real>();
}

inline bool is_supported_bits(unsigned bits) {
  for (unsigned b : kSupportedBits) {
    if (b == bits) return true;
  }
  return false;
}

/// Runs `f.template operator()<Float<bits>>()` for a runtime precision.
template <class F>
decltype(auto) with_bits(unsigned bits, F&& f) {
  switch (bits) {
    case 128: return f.template operator()<Float<128>>();
    case 256: return f.template operator()<Float<256>>();
    case 512: return f.template operator()<Float<512>>();
    case 1024: return f.template operator()<Float<1024>>();
    default: break;
  }
  fail(ErrorKind::kInvalidArgument, "unsupported precision " + std::to_string(bits) + " bits");
}

template <class Real>
Real to_real(const BigInt& v) {
  return static_cast<Real>(v);
}

template <class Real>
Real exact_ratio(const BigInt& num, const BigInt& den) {
  return static_cast<Real>(num) / static_cast<Real>(den);
}

/// (1 - e^{-x}) / x, with the x -> 0 limit 1.
template <class Real>
Real one_minus_exp_over(const Real& x) {
  using std::abs;
  if (x == 0) return Real(1);
  return -boost::math::expm1(-x) / x;
}

/// (e^{x} - 1) / x, with the x -> 0 limit 1.
template <class Real>
Real exp_minus_one_over(const Real& x) {
  if (x == 0) return Real(1);
  return boost::math::expm1(x) / x;
}

/// sin(z) / z.
template <class Real>
Real sinc(const Real& z) {
  using std::abs;
  using std::sin;
  if (abs(z) < Real(1) / 8) {
    // alternating series, converges to working precision within a few dozen terms
    const Real z2 = z * z;
    Real term = 1;
    Real sum = 1;
    for (int k = 1; k < 400; ++k) {
      term *= -z2 / Real((2 * k) * (2 * k + 1));
      const Real next = sum + term;
      if (next == sum) break;
      sum = next;
    }
    return sum;
  }
  return sin(z) / z;
}

/// sinc(a) - sinc(b) without cancellation when both arguments are small.
template <class Real>
Real sinc_difference(const Real& a, const Real& b) {
  using std::abs;
  using std::max;
  if (max(abs(a), abs(b)) >= Real(1) / 2) return sinc(a) - sinc(b);
  const Real a2 = a * a;
  const Real b2 = b * b;
  Real pa = 1;
  Real pb = 1;
  Real fact = 1;
  Real sum = 0;
  for (int k = 1; k < 400; ++k) {
    pa *= a2;
    pb *= b2;
    fact *= Real((2 * k) * (2 * k + 1));
    const Real term = (pa - pb) / fact;
    const Real next = (k % 2 == 1) ? sum - term : sum + term;
    if (next == sum && k > 1) break;
    sum = next;
  }
  return sum;
}

/// Sum in a fixed pairwise order so results do not depend on scheduling.
template <class Real>
Real pairwise_sum(const std::vector<Real>& v, std::size_t lo, std::size_t hi) {
  if (hi <= lo) return Real(0);
  if (hi - lo == 1) return v[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

template <class Real>
Real pairwise_sum(const std::vector<Real>& v) {
  return pairwise_sum(v, 0, v.size());
}

template <class Real>
double to_double(const Real& v) {
  return static_cast<double>(v);
}

}  // namespace heatlab
