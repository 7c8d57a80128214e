#pragma once

// Experiment harness behind the heatlab command-line tool: configuration,
// task orchestration and deterministic emission of CSV/JSON/plot files.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <boost/crc.hpp>

#include "heatlab/control.hpp"
#include "heatlab/json_io.hpp"
#include "heatlab/minimal_time.hpp"
#include "heatlab/observability.hpp"
#include "heatlab/sequences.hpp"

namespace heatlab {

inline constexpr const char* kToolVersion = "heatlab 1.0.0";

struct ExperimentConfig {
  Json anchor = Json{{"kind", "quadratic"}, {"a", -1}, {"b", 1}, {"d", 2}, {"c", 1}};
  double T = 0.1;
  double eps_start = 0.125;
  double eps_ratio = 0.5;
  unsigned eps_count = 7;
  std::string eps_source = "grid";  // "grid" or "witness"
  unsigned N_start = 8;
  unsigned N_max = 64;
  std::vector<unsigned> bits = default_ladder();
  double tol = 1e-2;
  double residual_tol = 1e-6;
  std::string out = "out";
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  unsigned classify_N_max = 1000;
  std::vector<std::pair<unsigned, double>> datum{{1, 1.0}};
  double control_eps = 0.1;
  unsigned control_N = 8;
  unsigned control_bits = 256;
  double delta = 0.05;
  unsigned J = 6;
  unsigned N_check = 40;
  double biortho_T = 1.0;
  unsigned biortho_N = 10;
  double witness_delta = 0.25;
  unsigned witness_K = 3;
  unsigned witness_N_max = 64;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

inline Json to_json(const ExperimentConfig& c) {
  Json datum = Json::array();
  for (const auto& [n, v] : c.datum) datum.push_back(Json::array({n, v}));
  return Json{{"anchor", c.anchor},
              {"T", c.T},
              {"eps_start", c.eps_start},
              {"eps_ratio", c.eps_ratio},
              {"eps_count", c.eps_count},
              {"eps_source", c.eps_source},
              {"N_start", c.N_start},
              {"N_max", c.N_max},
              {"bits", c.bits},
              {"tol", c.tol},
              {"residual_tol", c.residual_tol},
              {"out", c.out},
              {"seed", c.seed},
              {"jobs", c.jobs},
              {"classify_N_max", c.classify_N_max},
              {"datum", datum},
              {"control_eps", c.control_eps},
              {"control_N", c.control_N},
              {"control_bits", c.control_bits},
              {"delta", c.delta},
              {"J", c.J},
              {"N_check", c.N_check},
              {"biortho_T", c.biortho_T},
              {"biortho_N", c.biortho_N},
              {"witness_delta", c.witness_delta},
              {"witness_K", c.witness_K},
              {"witness_N_max", c.witness_N_max}};
}

inline void validate(const ExperimentConfig& c) {
  auto bad = [](const std::string& m) { fail(ErrorKind::kConfigInvalid, m); };
  if (!(c.T > 0)) bad("T must be positive");
  if (c.eps_count < 1) bad("eps grid is empty");
  if (!(c.eps_start > 0)) bad("eps_start must be positive");
  if (!(c.eps_ratio > 0 && c.eps_ratio < 1)) bad("eps_ratio must lie in (0,1)");
  if (c.eps_source != "grid" && c.eps_source != "witness") bad("eps_source must be 'grid' or 'witness'");
  if (c.N_start < 1 || c.N_max < c.N_start) bad("need 1 <= N_start <= N_max");
  if (c.bits.empty()) bad("bits ladder is empty");
  for (unsigned b : c.bits)
    if (!is_supported_bits(b)) bad("unsupported precision " + std::to_string(b));
  if (!std::is_sorted(c.bits.begin(), c.bits.end())) bad("bits ladder must be increasing");
  if (!is_supported_bits(c.control_bits)) bad("unsupported control_bits");
  if (!(c.tol > 0) || !(c.residual_tol > 0)) bad("tolerances must be positive");
  if (c.jobs < 1) bad("jobs must be at least 1");
  if (c.classify_N_max < 2) bad("classify_N_max must be at least 2");
  if (c.datum.empty()) bad("datum needs at least one mode");
  for (const auto& [n, v] : c.datum)
    if (n < 1 || n > c.control_N) bad("datum mode outside 1..control_N");
  if (!(c.control_eps > 0)) bad("control_eps must be positive");
  if (!(c.delta > 0)) bad("delta must be positive");
  if (c.J < 1 || c.N_check < 1) bad("J and N_check must be positive");
  if (!(c.biortho_T > 0) || c.biortho_N < 2) bad("biortho_T > 0 and biortho_N >= 2 required");
  if (!(c.witness_delta > 0) || c.witness_K < 1 || c.witness_N_max < 2) bad("invalid witness parameters");
  if (c.out.empty()) bad("out must be non-empty");
}

inline ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorKind::kConfigInvalid, "config must be a JSON object");
  ExperimentConfig c;
  const Json defaults = to_json(c);
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!defaults.contains(it.key())) fail(ErrorKind::kConfigInvalid, "unknown config key '" + it.key() + "'");
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
    };
    if (j.contains("anchor")) c.anchor = j["anchor"];
    get("T", c.T);
    get("eps_start", c.eps_start);
    get("eps_ratio", c.eps_ratio);
    get("eps_count", c.eps_count);
    get("eps_source", c.eps_source);
    get("N_start", c.N_start);
    get("N_max", c.N_max);
    get("bits", c.bits);
    get("tol", c.tol);
    get("residual_tol", c.residual_tol);
    get("out", c.out);
    get("seed", c.seed);
    get("jobs", c.jobs);
    get("classify_N_max", c.classify_N_max);
    if (j.contains("datum")) {
      c.datum.clear();
      for (const auto& m : j["datum"]) {
        if (!m.is_array() || m.size() != 2) fail(ErrorKind::kConfigInvalid, "datum entries are [n, coefficient]");
        c.datum.emplace_back(m[0].get<unsigned>(), m[1].get<double>());
      }
    }
    get("control_eps", c.control_eps);
    get("control_N", c.control_N);
    get("control_bits", c.control_bits);
    get("delta", c.delta);
    get("J", c.J);
    get("N_check", c.N_check);
    get("biortho_T", c.biortho_T);
    get("biortho_N", c.biortho_N);
    get("witness_delta", c.witness_delta);
    get("witness_K", c.witness_K);
    get("witness_N_max", c.witness_N_max);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kConfigInvalid, e.what());
  }
  validate(c);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kConfigInvalid, "cannot open config " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kConfigInvalid, std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

inline std::vector<double> eps_grid(const ExperimentConfig& c) {
  std::vector<double> g;
  for (unsigned k = 0; k < c.eps_count; ++k) g.push_back(c.eps_start * std::pow(c.eps_ratio, static_cast<double>(k)));
  return g;
}

/// Runs fn(i) for i in [0, count) on up to `jobs` threads. Results must be
/// stored by index so ordering never depends on scheduling.
inline void parallel_for(unsigned jobs, std::size_t count, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const unsigned n = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
  for (unsigned w = 0; w < n; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

struct Failure {
  std::string item;
  std::string kind;
  std::string message;
};

struct TaskStatus {
  std::string task;
  std::vector<Failure> failures;
  std::vector<std::string> notes;
};

/// Collects output files in memory; written once, in name order, with the
/// manifest last.
class OutputSet {
 public:
  void add(const std::string& name, std::string content) { files_[name] = std::move(content); }
  const std::map<std::string, std::string>& files() const { return files_; }

 private:
  std::map<std::string, std::string> files_;
};

inline std::uint32_t crc32(const std::string& s) {
  boost::crc_32_type crc;
  crc.process_bytes(s.data(), s.size());
  return crc.checksum();
}

inline std::string hex32(std::uint32_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(8);
  os.fill('0');
  os << v;
  return os.str();
}

inline Failure failure_from(const std::string& item, const Error& e) {
  return Failure{item, std::string(to_string(e.kind())), e.what()};
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) { row(header); }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

template <class Real>
std::string format_real(const Real& v) {
  const double d = static_cast<double>(v);
  if (std::isfinite(d) && (d != 0 || v == 0)) return format_double(d);
  return v.str(17, std::ios_base::scientific);
}

// ---------------------------------------------------------------- classify

inline void cmd_classify(const ExperimentConfig& c, OutputSet& out, TaskStatus& st) {
  st.task = "classify";
  AnchorPoint x0 = AnchorPoint::rational(1, 2);
  try {
    x0 = anchor_from_json(c.anchor);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfigInvalid) throw;
    st.failures.push_back(failure_from("anchor", e));
    return;
  }
  try {
    const auto est = estimate_T0(x0, c.classify_N_max);
    Json j{{"anchor", to_json(x0)}, {"estimate", to_json(est)}};
    // series test at the configured horizon
    using R = Float<256>;
    const auto s = series_test<R>(x0, R(c.T), std::max(2u, c.classify_N_max / 2));
    j["series"] = Json{{"T", c.T},
                       {"N", std::max(2u, c.classify_N_max / 2)},
                       {"verdict", to_string(s.verdict)},
                       {"partial_sum", json_real(s.partial_sum)}};
    out.add("classify.json", j.dump(2) + "\n");
    CsvWriter csv({"n", "exponent"});
    for (std::size_t n = 0; n < est.per_n_exponents.size(); ++n)
      csv.row({std::to_string(n + 1), format_double(est.per_n_exponents[n])});
    out.add("exponents.csv", csv.str());
  } catch (const Error& e) {
    st.failures.push_back(failure_from("estimate_T0", e));
  }
}

// ---------------------------------------------------------------- obs-sweep

struct SweepPoint {
  double eps = 0;
  std::optional<ObservabilityResult> result;
  std::optional<Failure> failure;
};

/// obs_constant with N doubling from N_start until converged or 2N > N_max.
inline ObservabilityResult converged_constant(double T, const SpatialProfile& where, unsigned N_start, unsigned N_max,
                                              double tol, const LadderOptions& opt) {
  std::map<std::size_t, EigenPoint> cache;
  auto at = [&](std::size_t N) -> const EigenPoint& {
    auto it = cache.find(N);
    if (it == cache.end()) it = cache.emplace(N, smallest_eigen(T, where, N, opt)).first;
    return it->second;
  };
  std::size_t N = N_start;
  if (2 * N > N_max) {
    ObservabilityResult r = make_result(T, at(N), at(N), tol);
    r.converged = false;
    return r;
  }
  for (;;) {
    ObservabilityResult r = make_result(T, at(N), at(2 * N), tol);
    if (r.converged || 4 * N > N_max) return r;
    N *= 2;
  }
}

inline void cmd_obs_sweep(const ExperimentConfig& c, OutputSet& out, TaskStatus& st) {
  st.task = "obs-sweep";
  AnchorPoint x0 = AnchorPoint::rational(1, 2);
  try {
    x0 = anchor_from_json(c.anchor);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfigInvalid) throw;
    st.failures.push_back(failure_from("anchor", e));
    return;
  }
  std::vector<double> grid;
  Json witness = nullptr;
  if (c.eps_source == "witness") {
    try {
      const auto w = point2_witness(x0, c.T, c.witness_delta, c.witness_K, c.witness_N_max);
      witness = Json::array();
      for (const auto& p : w) {
        grid.push_back(p.eps);
        witness.push_back(Json{{"n", p.n}, {"eps", json_number(p.eps)}, {"bound", json_number(p.bound)}});
      }
    } catch (const Error& e) {
      st.failures.push_back(failure_from("point2_witness", e));
      return;
    }
  } else {
    grid = eps_grid(c);
  }

  LadderOptions opt;
  opt.ladder = c.bits;
  std::vector<SweepPoint> points(grid.size());
  parallel_for(c.jobs, grid.size(), [&](std::size_t i) {
    points[i].eps = grid[i];
    try {
      const auto prof = SpatialProfile::interval(x0, grid[i]);
      points[i].result = converged_constant(c.T, prof, c.N_start, c.N_max, c.tol, opt);
    } catch (const Error& e) {
      points[i].failure = failure_from("eps=" + format_double(grid[i]), e);
    }
  });

  CsvWriter csv({"eps", "lambda_min", "sqrt_scale", "N_used", "converged", "precision_bits"});
  std::ostringstream plot;
  plot << "# eps sqrt_scale converged\n";
  std::vector<std::pair<double, double>> fit_points;
  Json excluded = Json::array();
  for (const auto& p : points) {
    if (p.failure) {
      st.failures.push_back(*p.failure);
      excluded.push_back(Json{{"eps", json_number(p.eps)}, {"reason", p.failure->kind}});
      continue;
    }
    const auto& r = *p.result;
    csv.row({format_double(p.eps), format_real(r.lambda_min), format_real(r.sqrt_scale), std::to_string(r.N_used),
             r.converged ? "true" : "false", std::to_string(r.precision_bits)});
    plot << format_double(p.eps) << ' ' << format_real(r.sqrt_scale) << ' ' << (r.converged ? 1 : 0) << '\n';
    if (r.converged && r.sqrt_scale > 0) {
      fit_points.emplace_back(p.eps, static_cast<double>(r.sqrt_scale));
    } else {
      excluded.push_back(Json{{"eps", json_number(p.eps)}, {"reason", r.converged ? "zero" : "unconverged"}});
      st.notes.push_back("eps=" + format_double(p.eps) + " unconverged (relative change " +
                         format_double(r.relative_change) + ")");
    }
  }
  Json fit{{"T", c.T}, {"anchor", to_json(x0)}, {"normalization", "final-state"}, {"excluded", excluded}};
  if (!witness.is_null()) fit["witness"] = witness;
  try {
    fit["fit"] = to_json(rate_fit(fit_points));
  } catch (const Error& e) {
    fit["fit"] = nullptr;
    fit["fit_error"] = e.what();
    st.failures.push_back(failure_from("rate_fit", e));
  }
  out.add("sweep.csv", csv.str());
  out.add("fit.json", fit.dump(2) + "\n");
  out.add("plot.dat", plot.str());
  out.add("plot.gp",
          "set logscale xy\n"
          "set xlabel 'eps'\n"
          "set ylabel 'sqrt_scale'\n"
          "plot 'plot.dat' using 1:2 with linespoints title 'C(T,eps)'\n");
}

// ---------------------------------------------------------------- control

template <class Real>
void control_task(const ExperimentConfig& c, const AnchorPoint& x0, OutputSet& out, TaskStatus& st) {
  const Real T(c.T);
  std::vector<Real> mu(c.control_N, Real(0));
  for (const auto& [n, v] : c.datum) mu[n - 1] += Real(v);
  const FourierState<Real> u0(mu);
  Json report{{"anchor", to_json(x0)},
              {"T", c.T},
              {"datum", to_json(u0)},
              {"eps", c.control_eps},
              {"N", c.control_N},
              {"precision_bits", precision_bits<Real>()},
              {"residual_tol", c.residual_tol}};

  std::map<std::string, std::optional<ScalarControl<Real>>> scalar_signals;
  auto run = [&](const std::string& name, auto&& fn) {
    try {
      auto r = fn();
      report[name] = to_json(r);
      if (r.residual_norm > Real(c.residual_tol))
        st.failures.push_back(Failure{name, "residual-above-tolerance", "residual " + format_real(r.residual_norm)});
      if (!std::holds_alternative<PerMode<Real>>(r.control.signal())) scalar_signals[name] = r.control;
    } catch (const Error& e) {
      report[name] = Json{{"error", std::string(to_string(e.kind()))}, {"message", e.what()}};
      st.failures.push_back(failure_from(name, e));
    }
  };

  std::optional<BiorthogonalFamily<Real>> family;
  try {
    family = biorthogonal_family<Real>(T, c.control_N);
  } catch (const Error& e) {
    st.failures.push_back(failure_from("biorthogonal_family", e));
  }
  if (family) {
    run("moment_interval", [&] { return moment_control_interval(u0, T, x0, c.control_eps, *family); });
    run("moment_point", [&] { return moment_control_point(u0, T, x0, *family); });
  }
  run("hum_interval", [&] { return hum_optimal_control(u0, T, SpatialProfile::interval(x0, c.control_eps), c.control_N); });
  run("hum_point", [&] { return hum_optimal_control(u0, T, SpatialProfile::dirac(x0), c.control_N); });

  // blow-up sweep and the averaged controls applied at the point
  const auto grid = eps_grid(c);
  const auto rows = blowup_diagnostic(u0, T, x0, grid);
  CsvWriter blow({"eps", "eps_half_norm", "residual", "averaged_point_residual", "error"});
  Json table = Json::array();
  const double delta = grid.front();
  for (const auto& row : rows) {
    std::string avg_res;
    std::string err = row.error;
    if (row.error.empty()) {
      try {
        const auto h = hum_optimal_control(u0, T, SpatialProfile::interval(x0, row.eps), c.control_N);
        const ScalarControl<Real> pc(SpatialProfile::dirac(x0), rescale_and_average(h.control, delta), T);
        avg_res = format_real(detail::relative_residual(evolve_forced(u0, pc, T).state, u0));
      } catch (const Error& e) {
        err = e.what();
      }
    }
    if (!err.empty()) st.failures.push_back(Failure{"blowup eps=" + format_double(row.eps), "sweep-point", err});
    for (char& ch : err)
      if (ch == ',' || ch == '\n') ch = ';';
    blow.row({format_double(row.eps), row.eps_half_norm ? format_real(*row.eps_half_norm) : "",
              row.residual ? format_real(*row.residual) : "", avg_res, err});
    table.push_back(Json{{"eps", row.eps},
                         {"eps_half_norm", row.eps_half_norm ? json_real(*row.eps_half_norm) : Json(nullptr)},
                         {"averaged_point_residual", avg_res.empty() ? Json(nullptr) : Json(avg_res)}});
  }
  report["blowup"] = table;
  report["averaging_delta"] = delta;

  std::vector<std::string> header{"t"};
  for (const auto& [name, ctrl] : scalar_signals) header.push_back(name);
  CsvWriter sig(header);
  const unsigned samples = 200;
  for (unsigned i = 0; i <= samples; ++i) {
    const Real t = T * Real(i) / Real(samples);
    std::vector<std::string> cells{format_real(t)};
    for (const auto& [name, ctrl] : scalar_signals) cells.push_back(format_real(ctrl->value(t)));
    sig.row(cells);
  }
  out.add("control.json", report.dump(2) + "\n");
  out.add("signals.csv", sig.str());
  out.add("blowup.csv", blow.str());
}

inline void cmd_control(const ExperimentConfig& c, OutputSet& out, TaskStatus& st) {
  st.task = "control";
  AnchorPoint x0 = AnchorPoint::rational(1, 2);
  try {
    x0 = anchor_from_json(c.anchor);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfigInvalid) throw;
    st.failures.push_back(failure_from("anchor", e));
    return;
  }
  with_bits(c.control_bits, [&]<class Real>() { control_task<Real>(c, x0, out, st); });
}

// ---------------------------------------------------------------- lemmas

inline void cmd_lemmas(const ExperimentConfig& c, OutputSet& out, TaskStatus& st) {
  st.task = "lemmas";
  Json report;
  std::optional<AnchorPoint> x0;
  try {
    x0 = anchor_from_json(c.anchor);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfigInvalid) throw;
    st.failures.push_back(failure_from("anchor", e));
  }
  double eps0_max = 1.0;
  if (x0) {
    const double v = x0->value<Float<128>>().convert_to<double>();
    eps0_max = std::nextafter(std::min(v, 1.0 - v), 0.0);
  }
  try {
    const auto seq = construct_eps_sequence(c.delta, c.J, c.N_check, c.seed, eps0_max);
    report["eps_sequence"] = to_json(seq);
    if (x0) {
      try {
        report["ineqsin"] = to_json(check_ineqsin(*x0, seq, 1, c.N_check));
      } catch (const Error& e) {
        st.failures.push_back(failure_from("check_ineqsin", e));
      }
    }
  } catch (const Error& e) {
    st.failures.push_back(failure_from("construct_eps_sequence", e));
  }

  try {
    with_bits(c.control_bits, [&]<class Real>() {
      const auto fam = biorthogonal_family<Real>(Real(c.biortho_T), c.biortho_N);
      std::vector<std::pair<double, double>> pts;
      Json norms = Json::array();
      for (std::size_t n = 0; n < fam.size; ++n) {
        const double ln = static_cast<double>(log(fam.norms[n]));
        pts.emplace_back(double(n + 1), ln);
        norms.push_back(Json{{"n", n + 1},
                             {"log_norm", json_number(ln)},
                             {"log_reference_bound", json_number(std::log(fattorini_bound(n + 1)))}});
      }
      // least-squares slope, intercept lifted to an upper envelope
      double mx = 0, my = 0;
      for (auto [x, y] : pts) mx += x, my += y;
      mx /= pts.size();
      my /= pts.size();
      double sxx = 0, sxy = 0;
      for (auto [x, y] : pts) sxx += (x - mx) * (x - mx), sxy += (x - mx) * (y - my);
      const double slope = sxy / sxx;
      double lift = -std::numeric_limits<double>::infinity();
      for (auto [x, y] : pts) lift = std::max(lift, y - slope * x);
      report["biorthogonal"] = Json{{"T", c.biortho_T},
                                    {"N", c.biortho_N},
                                    {"precision_bits", fam.bits},
                                    {"residual", json_real(fam.residual)},
                                    {"norms", norms},
                                    {"envelope", {{"slope", json_number(slope)}, {"intercept", json_number(lift)}}}};
    });
  } catch (const Error& e) {
    st.failures.push_back(failure_from("biorthogonal_family", e));
  }
  out.add("lemmas.json", report.dump(2) + "\n");
}

// ---------------------------------------------------------------- driver

enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitPartial = 3, kExitHard = 4 };

inline Json manifest_json(const ExperimentConfig& c, const std::vector<TaskStatus>& tasks, const OutputSet& files) {
  Json t = Json::array();
  for (const auto& s : tasks) {
    Json f = Json::array();
    for (const auto& x : s.failures) f.push_back(Json{{"item", x.item}, {"kind", x.kind}, {"message", x.message}});
    t.push_back(Json{{"task", s.task}, {"status", s.failures.empty() ? "ok" : "partial"}, {"failures", f}, {"notes", s.notes}});
  }
  Json inv = Json::array();
  for (const auto& [name, content] : files.files())
    inv.push_back(Json{{"file", name}, {"crc32", hex32(crc32(content))}, {"bytes", content.size()}});
  return Json{{"tool_version", kToolVersion}, {"config", to_json(c)}, {"tasks", t}, {"files", inv}};
}

inline void write_outputs(const std::string& dir, const OutputSet& files, const std::string& manifest) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const auto& [name, content] : files.files()) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    f << content;
    if (!f) fail(ErrorKind::kInvalidArgument, "cannot write " + name);
  }
  std::ofstream m(fs::path(dir) / "manifest.json", std::ios::binary);
  m << manifest;
  if (!m) fail(ErrorKind::kInvalidArgument, "cannot write manifest.json");
}

/// Runs one subcommand ("classify", "obs-sweep", "control", "lemmas", "all")
/// and writes its files. Returns the process exit code.
inline int run_command(const std::string& cmd, const ExperimentConfig& c) {
  OutputSet files;
  std::vector<TaskStatus> tasks;
  try {
    validate(c);
    files.add("config.json", to_json(c).dump(2) + "\n");
    auto task = [&](void (*fn)(const ExperimentConfig&, OutputSet&, TaskStatus&)) {
      TaskStatus st;
      fn(c, files, st);
      tasks.push_back(std::move(st));
    };
    if (cmd == "classify" || cmd == "all") task(cmd_classify);
    if (cmd == "obs-sweep" || cmd == "all") task(cmd_obs_sweep);
    if (cmd == "control" || cmd == "all") task(cmd_control);
    if (cmd == "lemmas" || cmd == "all") task(cmd_lemmas);
    if (tasks.empty()) fail(ErrorKind::kConfigInvalid, "unknown command '" + cmd + "'");
    write_outputs(c.out, files, manifest_json(c, tasks, files).dump(2) + "\n");
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfigInvalid) {
      std::cerr << e.what() << "\n";
      return kExitConfig;
    }
    std::cerr << e.what() << "\n";
    return kExitHard;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitHard;
  }
  for (const auto& t : tasks)
    if (!t.failures.empty()) return kExitPartial;
  return kExitOk;
}

}  // namespace heatlab
