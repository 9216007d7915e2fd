#pragma once
// Experiment configuration: a versioned JSON schema parsed into a typed
// struct.  Validation is strict and happens entirely before computation:
// unknown keys anywhere are rejected, every numeric field is range-checked,
// and keys irrelevant to the chosen experiment kind are errors, not noise.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "toeplab/common.hpp"
#include "toeplab/symbol.hpp"

namespace toeplab {

using json = nlohmann::ordered_json;

enum class ExperimentKind {
  radial,
  theorem1,
  signed_spectrum,
  banded,
  ortho,
  checks,
  watson,
  pushnitski,
};

inline const char* kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::radial: return "radial";
    case ExperimentKind::theorem1: return "theorem1";
    case ExperimentKind::signed_spectrum: return "signed";
    case ExperimentKind::banded: return "banded";
    case ExperimentKind::ortho: return "ortho";
    case ExperimentKind::checks: return "checks";
    case ExperimentKind::watson: return "watson";
    case ExperimentKind::pushnitski: return "pushnitski-compare";
  }
  throw std::logic_error("kind_name: bad enum");
}

inline ExperimentKind kind_from_name(const std::string& s) {
  for (ExperimentKind k :
       {ExperimentKind::radial, ExperimentKind::theorem1, ExperimentKind::signed_spectrum,
        ExperimentKind::banded, ExperimentKind::ortho, ExperimentKind::checks,
        ExperimentKind::watson, ExperimentKind::pushnitski})
    if (s == kind_name(k)) return k;
  throw std::invalid_argument("config: unknown experiment kind '" + s + "'");
}

// Pass/fail bands used by the runners.  Every band lives here with its
// default so analysis code never hard-codes one; configs may override any
// subset under "tolerances".
inline std::map<std::string, double> default_tolerances() {
  return {
      {"ratio_band", 0.15},         // radial: |ratio - 1| at the largest n
      {"watson_band", 0.20},        // watson: |ratio - 1| at the largest n
      {"identity_tol", 1e-12},      // gamma = 0 truncation vs identity
      {"counting_band", 0.05},      // counting vs C^{1/gamma}
      {"fit_band_lo", 0.70},        // fitted c_hat / angular sup norm
      {"fit_band_hi", 1.20},
      {"decomposition_change", 0.10},  // step split: c_hat shift between routes
      {"hs_change", 0.10},          // distant pairs: cross-norm drift under 2N
      {"adjacent_drop", 0.25},      // adjacent pairs: scaled decrease over window
      {"control_floor", 0.50},      // self pair: scaled tail vs window start
      {"slope_band", 0.10},         // cutoff decay slope vs 2 log(1-delta)
      {"banded_lo_frac", 0.50},     // banded scaled value at n = 1e3, fraction of target
      {"banded_hi_frac", 1.125},
      {"diag_tol", 1e-10},          // diagonal banded case vs analytic sequence
      {"pushnitski_band", 0.02},    // n^gamma s_n vs Gamma(gamma+1)/2^gamma
      {"stability_band", 0.01},     // leading singular values, N vs 2N
      {"noise_floor", 1e-12},       // signed runs: empty-branch ceiling
      {"difference_drop", 0.90},    // banded difference: scaled tail vs head
  };
}

struct ExperimentConfig {
  int schema_version = 1;
  ExperimentKind kind = ExperimentKind::radial;
  double gamma = 1.0;
  std::size_t dim = 0;  // N; kind default applied at parse
  std::size_t window_lo = 0, window_hi = 0;  // 0/0 = derive from dim
  std::uint64_t seed = 20260801ull;
  std::string out_dir = "out";

  AngularFactor angular = ConstantAngular{complex(1.0, 0.0)};
  RadialProfile profile = RadialProfile::one();
  std::size_t arcs = 1;

  std::vector<complex> band_coefficients;  // banded only; odd count
  std::size_t band_offset = 2;
  std::size_t difference_dim = 0;  // 0 = min(dim, 512)
  bool band_perturbed = false;     // epsilon(m) = 1/log(m+2) toggle

  std::vector<std::uint64_t> n_grid;  // radial / watson / pushnitski
  std::vector<double> gamma_grid;     // watson

  std::size_t samples = 100000;  // checks battery
  std::size_t families = 100;

  std::map<std::string, double> tolerances = default_tolerances();

  json echo = json::object();  // parsed input, embedded in reports

  double tol(const std::string& key) const {
    const auto it = tolerances.find(key);
    if (it == tolerances.end())
      throw std::out_of_range("tolerances: no key '" + key + "'");
    return it->second;
  }
};

// Fit window [n_lo, n_hi], 1-based ranks: configured override or the
// default [max(8, N/256), N/8].
inline std::pair<std::size_t, std::size_t> fit_window(const ExperimentConfig& c,
                                                      std::size_t dim) {
  if (c.window_lo != 0 || c.window_hi != 0) return {c.window_lo, c.window_hi};
  return {std::max<std::size_t>(8, dim / 256), dim / 8};
}

namespace detail {

inline void require_known_keys(const json& obj, const std::vector<const char*>& allowed,
                               const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok)
      throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + where);
  }
}

inline const json& need(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end())
    throw std::invalid_argument("config: missing key '" + std::string(key) + "' in " + where);
  return *it;
}

inline double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw std::invalid_argument("config: " + where + " must be a number");
  return j.get<double>();
}

inline std::uint64_t as_index(const json& j, const std::string& where) {
  // Accept signed storage too: in-memory construction yields number_integer.
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    throw std::invalid_argument("config: " + where + " must be a non-negative integer");
  return j.get<std::uint64_t>();
}

inline bool as_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) throw std::invalid_argument("config: " + where + " must be a boolean");
  return j.get<bool>();
}

inline std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw std::invalid_argument("config: " + where + " must be a string");
  return j.get<std::string>();
}

inline complex as_complex(const json& j, const std::string& where) {
  if (j.is_number()) return complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return complex(j[0].get<double>(), j[1].get<double>());
  throw std::invalid_argument("config: " + where + " must be a number or [re, im]");
}

inline AngularFactor parse_angular(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: symbol must be an object");
  const std::string type = as_string(need(j, "type", "symbol"), "symbol.type");
  if (type == "constant") {
    require_known_keys(j, {"type", "value"}, "symbol");
    return ConstantAngular{as_complex(need(j, "value", "symbol"), "symbol.value")};
  }
  if (type == "trig") {
    require_known_keys(j, {"type", "coefficients"}, "symbol");
    const json& arr = need(j, "coefficients", "symbol");
    if (!arr.is_array() || arr.empty())
      throw std::invalid_argument("config: symbol.coefficients must be a non-empty array");
    std::vector<complex> c;
    for (const json& e : arr) c.push_back(as_complex(e, "symbol.coefficients[]"));
    return TrigPolynomial(std::move(c));
  }
  if (type == "step") {
    // Breakpoints are given in turns (fractions of the circle) so configs
    // never have to spell out 2 pi exactly; default is the uniform split.
    require_known_keys(j, {"type", "values", "breakpoints_turns"}, "symbol");
    const json& varr = need(j, "values", "symbol");
    if (!varr.is_array() || varr.empty())
      throw std::invalid_argument("config: symbol.values must be a non-empty array");
    std::vector<complex> vals;
    for (const json& e : varr) vals.push_back(as_complex(e, "symbol.values[]"));
    std::vector<double> turns;
    if (j.contains("breakpoints_turns")) {
      for (const json& e : j["breakpoints_turns"])
        turns.push_back(as_number(e, "symbol.breakpoints_turns[]"));
      if (turns.size() != vals.size() + 1)
        throw std::invalid_argument(
            "config: symbol.breakpoints_turns needs one more entry than values");
      if (std::abs(turns.back() - turns.front() - 1.0) > 1e-12)
        throw std::invalid_argument("config: symbol.breakpoints_turns must span one turn");
    } else {
      for (std::size_t i = 0; i <= vals.size(); ++i)
        turns.push_back(static_cast<double>(i) / static_cast<double>(vals.size()));
    }
    std::vector<double> bp;
    for (double t : turns) bp.push_back(two_pi * t);
    bp.back() = bp.front() + two_pi;
    return StepFunction(std::move(bp), std::move(vals));
  }
  if (type == "sampled") {
    require_known_keys(j, {"type", "samples"}, "symbol");
    const json& arr = need(j, "samples", "symbol");
    if (!arr.is_array())
      throw std::invalid_argument("config: symbol.samples must be an array");
    std::vector<complex> s;
    for (const json& e : arr) s.push_back(as_complex(e, "symbol.samples[]"));
    return SampledContinuous(std::move(s));
  }
  throw std::invalid_argument("config: unknown symbol type '" + type + "'");
}

inline RadialProfile parse_profile(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: profile must be an object");
  const std::string type = as_string(need(j, "type", "profile"), "profile.type");
  if (type == "one") {
    require_known_keys(j, {"type"}, "profile");
    return RadialProfile::one();
  }
  if (type == "constant") {
    require_known_keys(j, {"type", "value"}, "profile");
    const double c = as_number(need(j, "value", "profile"), "profile.value");
    if (!std::isfinite(c) || c <= 0.0)
      throw std::invalid_argument("config: profile.value must be finite and positive");
    return RadialProfile::constant(c);
  }
  if (type == "inverse_one_plus_r") {
    require_known_keys(j, {"type"}, "profile");
    return RadialProfile::inverse_one_plus_r();
  }
  throw std::invalid_argument("config: unknown profile type '" + type + "'");
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& input) {
  using detail::as_bool;
  using detail::as_complex;
  using detail::as_index;
  using detail::as_number;
  using detail::as_string;
  using detail::need;
  using detail::require_known_keys;

  if (!input.is_object()) throw std::invalid_argument("config: top level must be an object");

  ExperimentConfig c;
  c.echo = input;

  const std::uint64_t version =
      as_index(need(input, "schema_version", "config"), "schema_version");
  if (version != 1) throw std::invalid_argument("config: schema_version must be 1");
  c.kind = kind_from_name(as_string(need(input, "kind", "config"), "kind"));

  // Keys legal for this kind; anything else is a config bug worth failing on.
  std::vector<const char*> allowed = {"schema_version", "kind",    "gamma", "seed",
                                      "out_dir",        "window",  "tolerances"};
  switch (c.kind) {
    case ExperimentKind::radial:
      allowed.insert(allowed.end(), {"n_grid", "profile"});
      break;
    case ExperimentKind::watson:
      allowed.insert(allowed.end(), {"n_grid", "gamma_grid"});
      break;
    case ExperimentKind::pushnitski:
      allowed.insert(allowed.end(), {"n_grid", "symbol"});
      break;
    case ExperimentKind::theorem1:
      allowed.insert(allowed.end(), {"N", "symbol", "profile", "arcs"});
      break;
    case ExperimentKind::signed_spectrum:
      allowed.insert(allowed.end(), {"N", "symbol", "profile"});
      break;
    case ExperimentKind::banded:
      allowed.insert(allowed.end(), {"N", "band"});
      break;
    case ExperimentKind::ortho:
      allowed.insert(allowed.end(), {"N", "arcs"});
      break;
    case ExperimentKind::checks:
      allowed.insert(allowed.end(), {"samples", "families"});
      break;
  }
  require_known_keys(input, allowed, "config");

  if (input.contains("gamma")) {
    c.gamma = as_number(input["gamma"], "gamma");
    if (!std::isfinite(c.gamma) || c.gamma < 0.0)
      throw std::invalid_argument("config: gamma must be finite and >= 0");
  }
  if (input.contains("seed")) c.seed = as_index(input["seed"], "seed");
  if (input.contains("out_dir")) {
    c.out_dir = as_string(input["out_dir"], "out_dir");
    if (c.out_dir.empty()) throw std::invalid_argument("config: out_dir must be non-empty");
  }
  if (input.contains("window")) {
    const json& w = input["window"];
    if (!w.is_object()) throw std::invalid_argument("config: window must be an object");
    require_known_keys(w, {"lo", "hi"}, "window");
    c.window_lo = as_index(need(w, "lo", "window"), "window.lo");
    c.window_hi = as_index(need(w, "hi", "window"), "window.hi");
    if (c.window_lo < 1 || !(c.window_lo < c.window_hi))
      throw std::invalid_argument("config: window needs 1 <= lo < hi");
  }
  if (input.contains("tolerances")) {
    const json& t = input["tolerances"];
    if (!t.is_object()) throw std::invalid_argument("config: tolerances must be an object");
    for (auto it = t.begin(); it != t.end(); ++it) {
      if (c.tolerances.find(it.key()) == c.tolerances.end())
        throw std::invalid_argument("config: unknown key '" + it.key() + "' in tolerances");
      const double v = as_number(*it, "tolerances." + it.key());
      if (!std::isfinite(v) || v <= 0.0)
        throw std::invalid_argument("config: tolerances." + it.key() +
                                    " must be finite and positive");
      c.tolerances[it.key()] = v;
    }
  }

  if (input.contains("symbol")) c.angular = detail::parse_angular(input["symbol"]);
  if (input.contains("profile")) c.profile = detail::parse_profile(input["profile"]);

  if (input.contains("n_grid")) {
    const json& g = input["n_grid"];
    if (!g.is_array() || g.empty())
      throw std::invalid_argument("config: n_grid must be a non-empty array");
    for (const json& e : g) {
      const std::uint64_t n = as_index(e, "n_grid[]");
      if (n < 1 || n >= 100000000ull)
        throw std::invalid_argument("config: n_grid entries must lie in [1, 1e8)");
      if (!c.n_grid.empty() && n <= c.n_grid.back())
        throw std::invalid_argument("config: n_grid must strictly increase");
      c.n_grid.push_back(n);
    }
  } else {
    c.n_grid = {1000, 10000, 100000, 1000000};
  }

  if (input.contains("gamma_grid")) {
    const json& g = input["gamma_grid"];
    if (!g.is_array() || g.empty())
      throw std::invalid_argument("config: gamma_grid must be a non-empty array");
    for (const json& e : g) {
      const double v = as_number(e, "gamma_grid[]");
      if (!std::isfinite(v) || v <= 0.0 || v > 8.0)
        throw std::invalid_argument("config: gamma_grid entries must lie in (0, 8]");
      c.gamma_grid.push_back(v);
    }
  } else {
    c.gamma_grid = {0.5, 1.0, 2.0};
  }

  if (input.contains("N")) c.dim = as_index(input["N"], "N");
  switch (c.kind) {
    case ExperimentKind::radial:
    case ExperimentKind::watson:
    case ExperimentKind::pushnitski:
    case ExperimentKind::checks:
      break;
    case ExperimentKind::theorem1:
      if (c.dim == 0) c.dim = 512;
      if (c.dim < 16 || c.dim > 8192)
        throw std::invalid_argument("config: theorem1 needs 16 <= N <= 8192 (dense path)");
      break;
    case ExperimentKind::signed_spectrum:
      if (c.dim == 0) c.dim = 256;
      if (c.dim < 16 || c.dim > 8192)
        throw std::invalid_argument("config: signed needs 16 <= N <= 8192 (dense path)");
      break;
    case ExperimentKind::banded:
      if (c.dim == 0) c.dim = 2000;
      if (c.dim < 16 || c.dim > 20000)
        throw std::invalid_argument("config: banded needs 16 <= N <= 20000");
      break;
    case ExperimentKind::ortho:
      if (c.dim == 0) c.dim = 256;
      if (c.dim < 256 || c.dim > 1024)
        throw std::invalid_argument("config: ortho needs 256 <= N <= 1024");
      break;
  }
  if (c.window_hi > c.dim && c.dim != 0)
    throw std::invalid_argument("config: window.hi exceeds N");

  if (input.contains("arcs")) {
    c.arcs = as_index(input["arcs"], "arcs");
    if (c.arcs < 1 || c.arcs > 64)
      throw std::invalid_argument("config: arcs must lie in [1, 64]");
  } else if (c.kind == ExperimentKind::ortho) {
    c.arcs = 4;
  }
  if (c.kind == ExperimentKind::ortho && c.arcs < 3)
    throw std::invalid_argument("config: ortho needs arcs >= 3");

  if (c.kind == ExperimentKind::banded) {
    const json& b = need(input, "band", "config");
    if (!b.is_object()) throw std::invalid_argument("config: band must be an object");
    require_known_keys(b, {"coefficients", "offset", "difference_N", "perturbed"}, "band");
    const json& arr = need(b, "coefficients", "band");
    if (!arr.is_array() || arr.empty() || arr.size() % 2 == 0)
      throw std::invalid_argument("config: band.coefficients needs an odd-length array");
    for (const json& e : arr)
      c.band_coefficients.push_back(as_complex(e, "band.coefficients[]"));
    const std::size_t half = (c.band_coefficients.size() - 1) / 2;
    if (half + 1 >= c.dim)
      throw std::invalid_argument("config: band wider than the matrix");
    if (half > 1 && c.dim > 8192)
      throw std::invalid_argument(
          "config: bandwidth exceeding dense budget (N <= 8192 unless tridiagonal)");
    if (b.contains("offset")) {
      c.band_offset = as_index(b["offset"], "band.offset");
      if (c.band_offset < 2) throw std::invalid_argument("config: band.offset must be >= 2");
    }
    if (b.contains("difference_N")) {
      c.difference_dim = as_index(b["difference_N"], "band.difference_N");
      if (c.difference_dim < 16 || c.difference_dim > 2048)
        throw std::invalid_argument("config: band.difference_N must lie in [16, 2048]");
    }
    if (b.contains("perturbed")) c.band_perturbed = as_bool(b["perturbed"], "band.perturbed");
  }
  if (c.difference_dim == 0) c.difference_dim = std::min<std::size_t>(c.dim, 512);

  if (input.contains("samples")) {
    c.samples = as_index(input["samples"], "samples");
    if (c.samples < 100 || c.samples > 10000000)
      throw std::invalid_argument("config: samples must lie in [100, 1e7]");
  }
  if (input.contains("families")) {
    c.families = as_index(input["families"], "families");
    if (c.families < 1 || c.families > 10000)
      throw std::invalid_argument("config: families must lie in [1, 1e4]");
  }

  if (c.kind == ExperimentKind::signed_spectrum && !angular_is_real(c.angular))
    throw std::invalid_argument("config: signed runs need a real angular factor");
  if (c.kind == ExperimentKind::pushnitski &&
      !std::holds_alternative<ConstantAngular>(c.angular))
    throw std::invalid_argument(
        "config: pushnitski-compare needs a constant angular factor");

  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: " + path.string() + " is not valid JSON: " +
                                e.what());
  }
  return parse_config(j);
}

}  // namespace toeplab
