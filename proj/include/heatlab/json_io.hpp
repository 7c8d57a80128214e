#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "heatlab/control.hpp"
#include "heatlab/diophantine.hpp"
#include "heatlab/errors.hpp"
#include "heatlab/minimal_time.hpp"
#include "heatlab/observability.hpp"
#include "heatlab/sequences.hpp"
#include "heatlab/spectral.hpp"

namespace heatlab {

using Json = nlohmann::ordered_json;

/// Shortest decimal that round-trips to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Doubles go in as numbers; non-finite values as "inf"/"-inf"/"nan".
inline Json json_number(double v) {
  if (std::isfinite(v)) return Json(v);
  return Json(format_double(v));
}

/// High-precision values: a double when representable, else a decimal string.
template <class Real>
Json json_real(const Real& v) {
  const double d = static_cast<double>(v);
  if (std::isfinite(d) && (d != 0 || v == 0)) return Json(d);
  if (v == 0) return Json(0.0);
  return Json(v.str(17, std::ios_base::scientific));
}

inline Json big_to_json(const BigInt& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
    return Json(static_cast<std::int64_t>(v));
  return Json(v.str());
}

inline BigInt big_from_json(const Json& j) {
  if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s.empty() || s.find_first_not_of("-0123456789") != std::string::npos)
      fail(ErrorKind::kConfigInvalid, "bad integer string '" + s + "'");
    return BigInt(s);
  }
  fail(ErrorKind::kConfigInvalid, "expected an integer");
}

inline Json to_json(const AnchorPoint& x) {
  Json j;
  std::visit(
      [&](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Rational>) {
          j["kind"] = "rational";
          j["p"] = big_to_json(v.p);
          j["q"] = big_to_json(v.q);
        } else if constexpr (std::is_same_v<V, QuadraticIrrational>) {
          j["kind"] = "quadratic";
          j["a"] = big_to_json(v.a);
          j["b"] = big_to_json(v.b);
          j["d"] = big_to_json(v.d);
          j["c"] = big_to_json(v.c);
        } else if constexpr (std::is_same_v<V, HighPrecisionDecimal>) {
          j["kind"] = "decimal";
          j["digits"] = v.digits;
          j["bits"] = v.bits;
        } else {
          j["kind"] = "liouville";
          Json cf = Json::array();
          for (const auto& a : v.cf) cf.push_back(big_to_json(a));
          j["cf"] = cf;
        }
      },
      x.variant());
  return j;
}

/// Accepts the four serialized kinds plus {"kind": "liouville", "target_T0":
/// t, "K": k}, which runs build_liouville_point.
inline AnchorPoint anchor_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    fail(ErrorKind::kConfigInvalid, "anchor needs a string 'kind'");
  const auto kind = j["kind"].get<std::string>();
  auto need = [&](const char* key) -> const Json& {
    if (!j.contains(key)) fail(ErrorKind::kConfigInvalid, "anchor '" + kind + "' needs '" + key + "'");
    return j[key];
  };
  try {
    if (kind == "rational") return AnchorPoint::rational(big_from_json(need("p")), big_from_json(need("q")));
    if (kind == "quadratic")
      return AnchorPoint::quadratic(big_from_json(need("a")), big_from_json(need("b")), big_from_json(need("d")),
                                    big_from_json(need("c")));
    if (kind == "decimal") return AnchorPoint::decimal(need("digits").get<std::string>(), need("bits").get<unsigned>());
    if (kind == "liouville") {
      if (j.contains("cf")) {
        std::vector<BigInt> cf;
        for (const auto& a : j["cf"]) cf.push_back(big_from_json(a));
        return AnchorPoint::liouville(std::move(cf));
      }
      return build_liouville_point(need("target_T0").get<double>(), need("K").get<unsigned>(),
                                   j.value("max_bits", 4096u));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kConfigInvalid, std::string("anchor: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kInvalidArgument) fail(ErrorKind::kConfigInvalid, e.what());
    throw;
  }
  fail(ErrorKind::kConfigInvalid, "unknown anchor kind '" + kind + "'");
}

template <class Real>
Json to_json(const FourierState<Real>& s) {
  Json c = Json::array();
  for (const auto& v : s.coeffs()) c.push_back(json_real(v));
  return Json{{"n", s.truncation()}, {"coeffs", c}};
}

template <class Real>
FourierState<Real> fourier_state_from_json(const Json& j) {
  std::vector<Real> c;
  for (const auto& v : j.at("coeffs")) c.push_back(v.is_string() ? Real(v.get<std::string>()) : Real(v.get<double>()));
  if (c.size() != j.at("n").get<std::size_t>()) fail(ErrorKind::kConfigInvalid, "FourierState n mismatch");
  return FourierState<Real>(std::move(c));
}

inline Json to_json(const SpatialProfile& p) {
  Json j{{"kind", p.is_interval() ? "interval" : "dirac"}, {"x0", to_json(p.x0())}};
  if (p.is_interval()) j["eps"] = p.eps();
  return j;
}

inline Json to_json(const MinimalTimeEstimate& e) {
  Json ex = Json::array();
  for (double v : e.per_n_exponents) ex.push_back(json_number(v));
  Json j{{"t0_lower", json_number(e.t0_lower)},
         {"t0_upper", json_number(e.t0_upper)},
         {"method", e.method},
         {"window", {e.window.first, e.window.second}},
         {"derived", true}};
  j["resonant_n"] = e.resonant_n ? Json(*e.resonant_n) : Json(nullptr);
  j["exponents"] = ex;
  return j;
}

inline Json to_json(const RateFit& f) {
  return Json{{"slope", json_number(f.slope)},
              {"intercept", json_number(f.intercept)},
              {"residual", json_number(f.residual)},
              {"points", f.points}};
}

inline Json to_json(const EpsSequence& s) {
  Json draws = Json::array();
  for (auto d : s.draws) draws.push_back(d);
  Json vals = Json::array();
  for (double v : s.values) vals.push_back(json_number(v));
  return Json{{"delta", json_number(s.delta)}, {"C", json_number(s.C_const)}, {"seed", s.seed},
              {"N_check", s.N_checked},         {"eps0_max", json_number(s.eps0_max)},
              {"values", vals},                 {"margins", json_number(s.margins)},
              {"draws", draws}};
}

inline Json to_json(const IneqsinCheck& c) {
  return Json{{"min_ratio", json_number(c.min_ratio)},
              {"witness", {{"j", c.witness_j}, {"n", c.witness_n}}},
              {"skipped_resonant", c.skipped_resonant},
              {"evaluated", c.evaluated}};
}

inline Json to_json(const ObservabilityResult& r) {
  return Json{{"lambda_min", json_real(r.lambda_min)},
              {"sqrt_scale", json_real(r.sqrt_scale)},
              {"N_used", r.N_used},
              {"converged", r.converged},
              {"relative_change", json_number(r.relative_change)},
              {"precision_bits", r.precision_bits},
              {"normalization", r.normalization == Normalization::kFinalState ? "final-state" : "initial-state"}};
}

template <class Real>
Json to_json(const ControlReport<Real>& r) {
  Json j{{"method", r.method},
         {"profile", to_json(r.control.profile())},
         {"horizon", json_real(r.control.horizon())},
         {"l2_norm", json_real(r.control.l2_norm())},
         {"residual_norm", json_real(r.residual_norm)},
         {"precision_bits", r.bits}};
  j["eps_half_norm"] = r.eps_half_norm ? json_real(*r.eps_half_norm) : Json(nullptr);
  if (r.family_size > 0) j["family"] = Json{{"size", r.family_size}, {"residual", json_real(r.family_residual)}};
  Json sig;
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        Json vals = Json::array();
        if constexpr (std::is_same_v<S, ExpSum<Real>>) {
          for (const auto& a : s.a) vals.push_back(json_real(a));
          sig = Json{{"kind", "expsum"}, {"reversed", s.reversed}, {"a", vals}};
        } else if constexpr (std::is_same_v<S, Sampled<Real>>) {
          for (const auto& a : s.values) vals.push_back(json_real(a));
          sig = Json{{"kind", "sampled"}, {"values", vals}};
        } else {
          for (const auto& a : s.eta) vals.push_back(json_real(a));
          sig = Json{{"kind", "per-mode"}, {"eta", vals}};
        }
      },
      r.control.signal());
  j["signal"] = sig;
  j["final_state"] = to_json(r.final_state);
  return j;
}

}  // namespace heatlab
