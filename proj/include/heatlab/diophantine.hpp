#pragma once

// Exact and certified arithmetic on the anchor point x0: nearest-fraction
// reductions n*x0 = p + r, best approximations theta_n, continued fractions
// and |sin(n pi x0)| evaluated from the reduced offset r.

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "heatlab/errors.hpp"
#include "heatlab/precision.hpp"

namespace heatlab {

struct Rational {
  BigInt p;
  BigInt q;
};

/// (a + b sqrt(d)) / c
struct QuadraticIrrational {
  BigInt a;
  BigInt b;
  BigInt d;
  BigInt c;
};

/// Leading decimal digits of x0, trusted to max(10^-digits, 2^-bits).
struct HighPrecisionDecimal {
  std::string digits;
  unsigned bits = 256;
};

/// Partial quotients a_1..a_K of x0 = [0; a_1, ..., a_K, 1, 1, 1, ...]. The
/// golden-ratio tail keeps the point irrational and exactly computable.
struct ConstructedLiouville {
  std::vector<BigInt> cf;
};

/// Number of bits a reduction of a decimal anchor must certify.
inline constexpr int kCertifiedBits = 32;

namespace detail {

inline BigInt floor_div(const BigInt& num, const BigInt& den) {
  BigInt q = num / den;
  BigInt r = num % den;
  if (r != 0 && ((r < 0) != (den < 0))) --q;
  return q;
}

inline BigInt isqrt(const BigInt& v) { return boost::multiprecision::sqrt(v); }

inline int sign(const BigInt& v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

/// Sign of alpha + beta sqrt(d), d >= 0.
inline int quad_sign(const BigInt& alpha, const BigInt& beta, const BigInt& d) {
  const int sa = sign(alpha);
  const int sb = (d == 0) ? 0 : sign(beta);
  if (sb == 0) return sa;
  if (sa == 0 || sa == sb) return sb;
  const BigInt lhs = alpha * alpha;
  const BigInt rhs = beta * beta * d;
  if (lhs == rhs) return 0;
  return lhs > rhs ? sa : sb;
}

/// floor((alpha + beta sqrt(d)) / gamma) for gamma > 0 and non-square d.
inline BigInt quad_floor(const BigInt& alpha, const BigInt& beta, const BigInt& d, const BigInt& gamma) {
  if (beta == 0 || d == 0) return floor_div(alpha, gamma);
  const BigInt t = isqrt(beta * beta * d);
  if (beta > 0) return floor_div(alpha + t, gamma);
  return floor_div(alpha - t - 1, gamma);
}

inline bool is_square(const BigInt& v) {
  if (v < 0) return false;
  const BigInt r = isqrt(v);
  return r * r == v;
}

/// (a + b sqrt(d)) / c with c > 0; b == 0 or d == 0 encodes a rational.
struct QuadForm {
  BigInt a;
  BigInt b = 0;
  BigInt d = 0;
  BigInt c = 1;

  bool rational() const { return b == 0 || d == 0; }
};

inline QuadForm normalized(QuadForm f) {
  if (f.c == 0) fail(ErrorKind::kInvalidArgument, "zero denominator");
  if (f.c < 0) {
    f.a = -f.a;
    f.b = -f.b;
    f.c = -f.c;
  }
  if (f.rational()) {
    f.b = 0;
    f.d = 0;
  }
  BigInt g = boost::multiprecision::gcd(f.a, f.c);
  if (!f.rational()) g = boost::multiprecision::gcd(g, f.b);
  if (g > 1) {
    f.a /= g;
    f.b /= g;
    f.c /= g;
  }
  return f;
}

inline BigInt pow10(unsigned k) {
  BigInt r = 1;
  for (unsigned i = 0; i < k; ++i) r *= 10;
  return r;
}

inline std::vector<BigInt> euclid_quotients(BigInt num, BigInt den, std::size_t max_terms) {
  std::vector<BigInt> out;
  while (den != 0 && out.size() < max_terms) {
    const BigInt q = floor_div(num, den);
    out.push_back(q);
    const BigInt r = num - q * den;
    num = den;
    den = r;
  }
  return out;
}

}  // namespace detail

/// Offset of n*x0 from its nearest integer: n*x0 = nearest + offset with
/// offset in [-1/2, 1/2].
template <class Real>
struct Reduction {
  BigInt nearest;
  Real offset;
  bool exact_zero = false;
};

struct ContinuedFraction {
  std::vector<BigInt> quotients;                        // a_0, a_1, ...
  std::vector<std::pair<BigInt, BigInt>> convergents;   // p_k / q_k, lowest terms
  bool terminated = false;                              // expansion ended (rational x0)
};

class AnchorPoint {
 public:
  using Variant = std::variant<Rational, QuadraticIrrational, HighPrecisionDecimal, ConstructedLiouville>;

  static AnchorPoint rational(BigInt p, BigInt q) {
    if (q == 0) fail(ErrorKind::kInvalidArgument, "rational anchor with zero denominator");
    if (q < 0) {
      p = -p;
      q = -q;
    }
    const BigInt g = boost::multiprecision::gcd(p, q);
    if (g > 1) {
      p /= g;
      q /= g;
    }
    if (p <= 0 || p >= q) fail(ErrorKind::kInvalidArgument, "anchor must lie in (0,1)");
    AnchorPoint x;
    x.v_ = Rational{p, q};
    x.form_ = detail::QuadForm{p, 0, 0, q};
    return x;
  }

  static AnchorPoint quadratic(BigInt a, BigInt b, BigInt d, BigInt c) {
    if (d < 2 || detail::is_square(d))
      fail(ErrorKind::kInvalidArgument, "quadratic anchor needs a non-square radicand d >= 2");
    if (b == 0) fail(ErrorKind::kInvalidArgument, "quadratic anchor needs b != 0");
    const detail::QuadForm f = detail::normalized(detail::QuadForm{a, b, d, c});
    check_unit_interval(f);
    AnchorPoint x;
    x.v_ = QuadraticIrrational{f.a, f.b, f.d, f.c};
    x.form_ = f;
    return x;
  }

  /// `digits` is either "0.xxxx" or the bare fractional digits "xxxx".
  static AnchorPoint decimal(std::string digits, unsigned bits) {
    std::string frac = digits;
    if (frac.rfind("0.", 0) == 0) frac = frac.substr(2);
    else if (!frac.empty() && frac[0] == '.') frac = frac.substr(1);
    if (frac.empty() || !std::all_of(frac.begin(), frac.end(), [](unsigned char ch) { return std::isdigit(ch); }))
      fail(ErrorKind::kInvalidArgument, "decimal anchor needs digits after '0.'");
    if (bits < 8) fail(ErrorKind::kInvalidArgument, "decimal anchor needs at least 8 bits");
    const BigInt num(frac);
    const BigInt den = detail::pow10(static_cast<unsigned>(frac.size()));
    if (num == 0) fail(ErrorKind::kInvalidArgument, "anchor must lie in (0,1)");
    AnchorPoint x;
    x.v_ = HighPrecisionDecimal{"0." + frac, bits};
    x.form_ = detail::QuadForm{num, 0, 0, den};
    // trust radius max(10^-k, 2^-bits) as a rational unc_num_/unc_den_
    const BigInt two_bits = BigInt(1) << bits;
    if (two_bits < den) {
      x.unc_num_ = 1;
      x.unc_den_ = two_bits;
    } else {
      x.unc_num_ = 1;
      x.unc_den_ = den;
    }
    if (num - 1 <= 0 || num + 1 >= den) fail(ErrorKind::kInvalidArgument, "decimal anchor too close to 0 or 1");
    return x;
  }

  static AnchorPoint liouville(std::vector<BigInt> cf) {
    if (cf.empty()) fail(ErrorKind::kInvalidArgument, "liouville anchor needs at least one partial quotient");
    for (const auto& a : cf)
      if (a < 1) fail(ErrorKind::kInvalidArgument, "partial quotients must be >= 1");
    // convergents of [0; a_1..a_K]
    BigInt p_prev = 1, q_prev = 0;  // k = -1
    BigInt p = 0, q = 1;            // k = 0
    for (const auto& a : cf) {
      BigInt pn = a * p + p_prev;
      BigInt qn = a * q + q_prev;
      p_prev = p;
      q_prev = q;
      p = pn;
      q = qn;
    }
    // complete quotient phi = (1 + sqrt5)/2 appended after a_K
    const BigInt A = p + 2 * p_prev, B = p, C = q + 2 * q_prev, D = q;
    detail::QuadForm f{A * C - 5 * B * D, B * C - A * D, 5, C * C - 5 * D * D};
    f = detail::normalized(f);
    check_unit_interval(f);
    AnchorPoint x;
    x.v_ = ConstructedLiouville{std::move(cf)};
    x.form_ = f;
    return x;
  }

  const Variant& variant() const { return v_; }

  std::string kind() const {
    switch (v_.index()) {
      case 0: return "rational";
      case 1: return "quadratic";
      case 2: return "decimal";
      default: return "liouville";
    }
  }

  bool is_rational() const { return std::holds_alternative<Rational>(v_); }
  bool is_exact() const { return unc_den_ == 0; }

  /// Denominator q of a Rational anchor.
  const BigInt& denominator() const {
    if (!is_rational()) fail(ErrorKind::kInvalidArgument, "anchor is not rational");
    return std::get<Rational>(v_).q;
  }

  template <class Real>
  Real value() const {
    using std::sqrt;
    Real v = static_cast<Real>(form_.a);
    if (!form_.rational()) v += static_cast<Real>(form_.b) * sqrt(static_cast<Real>(form_.d));
    return v / static_cast<Real>(form_.c);
  }

  /// x0 -> 1 - x0, preserving the variant.
  AnchorPoint reflected() const {
    if (const auto* r = std::get_if<Rational>(&v_)) return rational(r->q - r->p, r->q);
    if (const auto* qi = std::get_if<QuadraticIrrational>(&v_)) return quadratic(qi->c - qi->a, -qi->b, qi->d, qi->c);
    if (const auto* dec = std::get_if<HighPrecisionDecimal>(&v_)) {
      const BigInt num = form_.c - form_.a;
      std::string digits = num.str();
      const std::size_t width = form_.c.str().size() - 1;
      digits.insert(0, width - digits.size(), '0');
      return decimal("0." + digits, dec->bits);
    }
    const auto& cf = std::get<ConstructedLiouville>(v_).cf;
    std::vector<BigInt> out;
    if (cf[0] > 1) {
      out.push_back(1);
      out.push_back(cf[0] - 1);
      out.insert(out.end(), cf.begin() + 1, cf.end());
    } else if (cf.size() > 1) {
      out.push_back(cf[1] + 1);
      out.insert(out.end(), cf.begin() + 2, cf.end());
    } else {
      // [0;1,1,1,...] = 1/phi, whose reflection is [0;2,1,1,...]
      out.push_back(2);
    }
    return liouville(std::move(out));
  }

  /// n*x0 = nearest + offset. Exact variants give offset to full working
  /// precision; decimal anchors throw precision-exhausted when fewer than
  /// kCertifiedBits bits of the offset survive the trust radius.
  template <class Real>
  Reduction<Real> reduce(const BigInt& n) const {
    using std::abs;
    using std::sqrt;
    const BigInt A = n * form_.a;
    const BigInt B = n * form_.b;
    const BigInt& c = form_.c;
    // nearest = floor(n x0 + 1/2)
    const BigInt nearest = detail::quad_floor(2 * A + c, 2 * B, form_.d, 2 * c);
    const BigInt alpha = A - nearest * c;
    Reduction<Real> out;
    out.nearest = nearest;
    if (form_.rational()) {
      out.exact_zero = (alpha == 0);
      out.offset = exact_ratio<Real>(alpha, c);
    } else {
      const int sa = detail::sign(alpha);
      const int sb = detail::sign(B);
      const Real root = sqrt(static_cast<Real>(form_.d));
      if (sa == 0 || sa == sb) {
        out.offset = (static_cast<Real>(alpha) + static_cast<Real>(B) * root) / static_cast<Real>(c);
      } else {
        // alpha + B sqrt(d) = (alpha^2 - B^2 d) / (alpha - B sqrt(d)), no cancellation
        const BigInt num = alpha * alpha - B * B * form_.d;
        out.offset = static_cast<Real>(num) / ((static_cast<Real>(alpha) - static_cast<Real>(B) * root) * static_cast<Real>(c));
      }
    }
    if (!is_exact()) {
      // |error in offset| <= n * trust radius
      const Real err = static_cast<Real>(n) * exact_ratio<Real>(unc_num_, unc_den_);
      using std::ldexp;
      if (out.exact_zero || abs(out.offset) < ldexp(err, kCertifiedBits)) {
        fail(ErrorKind::kPrecisionExhausted,
             "decimal anchor cannot certify n*x0 mod 1 for n = " + n.str());
      }
    }
    return out;
  }

  template <class Real>
  Reduction<Real> reduce(unsigned long long n) const {
    return reduce<Real>(BigInt(n));
  }

  /// theta_n = min_p |x0 - p/n|.
  template <class Real>
  Real theta(const BigInt& n) const {
    using std::abs;
    if (n < 1) fail(ErrorKind::kInvalidArgument, "theta needs n >= 1");
    return abs(reduce<Real>(n).offset) / static_cast<Real>(n);
  }

  /// sin(n pi x0) with sign, from the reduced offset.
  template <class Real>
  Real sin_npi(const BigInt& n) const {
    using std::sin;
    if (n == 0) return Real(0);
    const auto red = reduce<Real>(n);
    if (red.exact_zero) return Real(0);
    const Real s = sin(pi<Real>() * red.offset);
    return boost::multiprecision::bit_test(BigInt(abs(red.nearest)), 0) ? Real(-s) : s;
  }

  /// cos(n pi x0) with sign, from the reduced offset.
  template <class Real>
  Real cos_npi(const BigInt& n) const {
    using std::cos;
    if (n == 0) return Real(1);
    const auto red = reduce<Real>(n);
    const Real c = red.exact_zero ? Real(1) : Real(cos(pi<Real>() * red.offset));
    return boost::multiprecision::bit_test(BigInt(abs(red.nearest)), 0) ? Real(-c) : c;
  }

  /// |sin(n pi x0)| = sin(pi * dist(n x0, Z)).
  template <class Real>
  Real abs_sin_npi(const BigInt& n) const {
    using std::abs;
    using std::sin;
    if (n < 1) fail(ErrorKind::kInvalidArgument, "abs_sin_npi needs n >= 1");
    const auto red = reduce<Real>(n);
    if (red.exact_zero) return Real(0);
    return sin(pi<Real>() * abs(red.offset));
  }

  /// Partial quotients a_0..a_depth and convergents. Terminates early for
  /// rational x0.
  ContinuedFraction continued_fraction(std::size_t depth) const {
    if (depth < 1) fail(ErrorKind::kInvalidArgument, "continued_fraction needs depth >= 1");
    std::vector<BigInt> q;
    bool terminated = false;
    if (!is_exact()) {
      // expand both ends of the trust interval; keep the common prefix
      const BigInt lo_num = form_.a * unc_den_ - unc_num_ * form_.c;
      const BigInt hi_num = form_.a * unc_den_ + unc_num_ * form_.c;
      const BigInt den = form_.c * unc_den_;
      const auto lo = detail::euclid_quotients(lo_num, den, depth + 2);
      const auto hi = detail::euclid_quotients(hi_num, den, depth + 2);
      std::size_t k = 0;
      // the last quotient of a finite expansion is ambiguous ([..., a] = [..., a-1, 1])
      while (k < depth + 1 && k + 1 < lo.size() && k + 1 < hi.size() && lo[k] == hi[k]) ++k;
      if (k < depth + 1)
        fail(ErrorKind::kPrecisionExhausted,
             "decimal anchor certifies only " + std::to_string(k == 0 ? 0 : k - 1) + " partial quotients");
      q.assign(lo.begin(), lo.begin() + static_cast<std::ptrdiff_t>(depth + 1));
    } else if (form_.rational()) {
      q = detail::euclid_quotients(form_.a, form_.c, depth + 1);
      terminated = q.size() < depth + 1 || detail::euclid_quotients(form_.a, form_.c, depth + 2).size() == q.size();
    } else {
      // (P + sqrt(D)) / Q recurrence with Q | D - P^2
      BigInt P = form_.a, Q = form_.c, D = form_.b * form_.b * form_.d;
      if (form_.b < 0) {
        P = -P;
        Q = -Q;
      }
      const BigInt absQ = Q < 0 ? BigInt(-Q) : Q;
      P *= absQ;
      D *= Q * Q;
      Q *= absQ;
      const BigInt s = detail::isqrt(D);
      for (std::size_t k = 0; k <= depth; ++k) {
        const BigInt a = Q > 0 ? detail::floor_div(P + s, Q) : detail::floor_div(P + s + 1, Q);
        q.push_back(a);
        P = a * Q - P;
        Q = (D - P * P) / Q;
      }
    }
    ContinuedFraction out;
    out.quotients = q;
    out.terminated = terminated;
    BigInt p_prev = 1, q_prev = 0, p_cur = q[0], q_cur = 1;
    out.convergents.emplace_back(p_cur, q_cur);
    for (std::size_t k = 1; k < q.size(); ++k) {
      BigInt pn = q[k] * p_cur + p_prev;
      BigInt qn = q[k] * q_cur + q_prev;
      p_prev = p_cur;
      q_prev = q_cur;
      p_cur = pn;
      q_cur = qn;
      out.convergents.emplace_back(p_cur, q_cur);
    }
    return out;
  }

  friend bool operator==(const AnchorPoint& x, const AnchorPoint& y) {
    return x.form_.a == y.form_.a && x.form_.b == y.form_.b && x.form_.d == y.form_.d && x.form_.c == y.form_.c &&
           x.unc_num_ == y.unc_num_ && x.unc_den_ == y.unc_den_ && x.v_.index() == y.v_.index();
  }

 private:
  static void check_unit_interval(const detail::QuadForm& f) {
    if (detail::quad_sign(f.a, f.b, f.d) <= 0 || detail::quad_sign(f.a - f.c, f.b, f.d) >= 0)
      fail(ErrorKind::kInvalidArgument, "anchor must lie in (0,1)");
  }

  Variant v_;
  detail::QuadForm form_;
  BigInt unc_num_ = 0;
  BigInt unc_den_ = 0;  // 0: exact
};

template <class Real>
struct ThetaSequence {
  std::vector<Real> values;     // theta_1 .. theta_N
  std::vector<BigInt> argmins;  // p attaining theta_n
};

template <class Real>
ThetaSequence<Real> theta_sequence(const AnchorPoint& x0, unsigned n_max) {
  using std::abs;
  ThetaSequence<Real> out;
  for (unsigned n = 1; n <= n_max; ++n) {
    const auto red = x0.reduce<Real>(BigInt(n));
    out.values.push_back(abs(red.offset) / Real(n));
    out.argmins.push_back(red.nearest);
  }
  return out;
}

template <class Real>
Real theta(unsigned long long n, const AnchorPoint& x0) {
  return x0.theta<Real>(BigInt(n));
}

template <class Real>
Real abs_sin_npi(unsigned long long n, const AnchorPoint& x0) {
  return x0.abs_sin_npi<Real>(BigInt(n));
}

inline ContinuedFraction continued_fraction(const AnchorPoint& x0, std::size_t depth) {
  return x0.continued_fraction(depth);
}

template <class Real>
struct LiouvilleCheck {
  bool holds = true;
  Real worst_ratio;  // min_n theta_n * n^m
  unsigned worst_n = 0;
};

/// Checks theta_n > c / n^m for every n <= N.
template <class Real>
LiouvilleCheck<Real> liouville_bound_check(const AnchorPoint& x0, int m, const Real& c, unsigned N) {
  using boost::multiprecision::pow;
  if (m < 2) fail(ErrorKind::kInvalidArgument, "liouville_bound_check needs m >= 2");
  if (N < 1) fail(ErrorKind::kInvalidArgument, "liouville_bound_check needs N >= 1");
  LiouvilleCheck<Real> out;
  bool first = true;
  for (unsigned n = 1; n <= N; ++n) {
    Real nm = 1;
    for (int k = 0; k < m; ++k) nm *= Real(n);
    const Real ratio = x0.theta<Real>(BigInt(n)) * nm;
    if (first || ratio < out.worst_ratio) {
      out.worst_ratio = ratio;
      out.worst_n = n;
      first = false;
    }
    if (!(ratio > c)) out.holds = false;
  }
  return out;
}

}  // namespace heatlab
