#pragma once
// Acceptance battery: fourteen pinned criteria.  Each criterion configures
// experiment runs, executes them, and judges the manifests they left on
// disk, so the battery exercises exactly the artifact path users consume.
// A criterion whose run throws is reported failed with the error message.

#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "toeplab/runners.hpp"

namespace toeplab {

struct CriterionResult {
  int number = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

namespace detail {

inline json manifest_after(const ExperimentConfig& c) {
  run_experiment(c);
  std::ifstream in(std::filesystem::path(c.out_dir) / "manifest.json");
  if (!in) throw std::runtime_error("acceptance: run left no manifest");
  return json::parse(in);
}

inline ExperimentConfig acceptance_config(const std::string& text,
                                          const std::filesystem::path& out_root,
                                          const char* leaf) {
  json j = json::parse(text);
  j["out_dir"] = (out_root / leaf).string();
  return parse_config(j);
}

}  // namespace detail

inline std::vector<CriterionResult> run_acceptance(
    const std::filesystem::path& out_root,
    const std::function<void(const CriterionResult&)>& on_result = {}) {
  using detail::acceptance_config;
  using detail::format_params;
  using detail::manifest_after;

  std::vector<CriterionResult> results;
  const auto add = [&](int num, const char* name, bool pass, std::string detail) {
    results.push_back({num, name, pass, std::move(detail)});
    if (on_result) on_result(results.back());
  };
  const auto guarded = [&](int num, const char* name, auto&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      add(num, name, false, std::string("error: ") + e.what());
    }
  };

  guarded(1, "radial diagonal asymptote", [&] {
    const json m = manifest_after(acceptance_config(
        R"({"schema_version":1,"kind":"radial","gamma":1.0,
            "n_grid":[1000,10000,100000,1000000]})",
        out_root, "c01_radial"));
    const bool mono = m.at("summary").at("strictly_monotone").get<bool>();
    const double dev = m.at("summary").at("final_abs_dev").get<double>();
    add(1, "radial diagonal asymptote", mono && dev <= 0.15,
        format_params("final |ratio-1|=%.4f monotone=%s", dev, mono ? "yes" : "no"));
  });

  guarded(2, "watson moment ratios", [&] {
    const json m = manifest_after(acceptance_config(
        R"({"schema_version":1,"kind":"watson","gamma_grid":[0.5,1.0,2.0],
            "n_grid":[1000,10000,100000,1000000]})",
        out_root, "c02_watson"));
    bool all = true;
    double worst = 0.0;
    for (const json& combo : m.at("summary").at("combos")) {
      const double dev = combo.at("final_abs_dev").get<double>();
      worst = std::max(worst, dev);
      all = all && dev <= 0.2 && combo.at("monotone_decreasing").get<bool>();
    }
    add(2, "watson moment ratios", all,
        format_params("6 combos, worst final |ratio-1|=%.4f", worst));
  });

  guarded(3, "identity fixture", [&] {
    const json m = manifest_after(acceptance_config(
        R"({"schema_version":1,"kind":"theorem1","gamma":0.0,"N":64,
            "symbol":{"type":"constant","value":1}})",
        out_root, "c03_identity"));
    const double dev = m.at("summary").at("identity_max_dev").get<double>();
    add(3, "identity fixture", dev <= 1e-12, format_params("max |T-I|=%.3g", dev));
  });

  // One checks run feeds criteria 4-7 and 11.
  json checks;
  std::string checks_error;
  try {
    checks = manifest_after(acceptance_config(
        R"({"schema_version":1,"kind":"checks","samples":100000,"families":100,
            "seed":20260801})",
        out_root, "c04_checks"));
  } catch (const std::exception& e) {
    checks_error = e.what();
  }
  const auto from_checks = [&](int num, const char* name, auto&& judge) {
    if (!checks_error.empty()) {
      add(num, name, false, "error: " + checks_error);
      return;
    }
    try {
      judge(checks.at("summary"));
    } catch (const std::exception& e) {
      add(num, name, false, std::string("error: ") + e.what());
    }
  };

  from_checks(4, "counting-function equivalence", [&](const json& s) {
    const double dev = s.at("counting_max_rel_dev").get<double>();
    add(4, "counting-function equivalence", dev <= 0.05,
        format_params("max rel dev=%.4f over 3 (C,gamma) cases", dev));
  });

  from_checks(5, "block family identities", [&](const json& s) {
    const double failures = s.at("p4_failures").get<double>();
    add(5, "block family identities", failures == 0.0,
        format_params("%.0f of 100 families failed", failures));
  });

  from_checks(6, "tuple product inequality", [&](const json& s) {
    std::size_t seen = 0, passed = 0;
    for (const json& c : s.at("checks"))
      if (c.at("check") == "lemma44") {
        ++seen;
        if (c.at("pass").get<bool>()) ++passed;
      }
    add(6, "tuple product inequality", seen == 4 && passed == 4,
        format_params("%zu/4 tuple sizes clean, min ratio=%.3f", passed,
                      s.at("lemma44_min_ratio").get<double>()));
  });

  from_checks(7, "weyl-type inequalities", [&](const json& s) {
    const double violations = s.at("weyl_violations").get<double>();
    add(7, "weyl-type inequalities", violations == 0.0,
        format_params("%.0f violations over 100 pairs", violations));
  });

  guarded(8, "theorem-1 trend, trig symbol", [&] {
    const json m = manifest_after(acceptance_config(
        R"({"schema_version":1,"kind":"theorem1","gamma":1.0,"N":4096,
            "symbol":{"type":"trig","coefficients":[0.5,2,0.5]},
            "window":{"lo":32,"hi":512}})",
        out_root, "c08_trig"));
    const double c_hat = m.at("summary").at("c_hat").get<double>();
    const bool rising = m.at("summary").at("endpoint_increasing").get<bool>();
    add(8, "theorem-1 trend, trig symbol",
        c_hat >= 2.1 && c_hat <= 3.6 && rising,
        format_params("c_hat=%.3f (band [2.1, 3.6]), endpoint rising=%s", c_hat,
                      rising ? "yes" : "no"));
  });

  guarded(9, "step symbol decomposition", [&] {
    const json m = manifest_after(acceptance_config(
        R"({"schema_version":1,"kind":"theorem1","gamma":1.0,"N":4096,"arcs":2,
            "symbol":{"type":"step","values":[1,0.5]}})",
        out_root, "c09_step"));
    const double c_hat = m.at("summary").at("c_hat").get<double>();
    const double change = m.at("summary").at("split_rel_change").get<double>();
    add(9, "step symbol decomposition",
        c_hat >= 0.7 && c_hat <= 1.2 && change <= 0.10,
        format_params("c_hat=%.3f (band [0.7, 1.2]), split change=%.3f", c_hat, change));
  });

  guarded(10, "asymptotic orthogonality", [&] {
    const json m = manifest_after(acceptance_config(
        R"({"schema_version":1,"kind":"ortho","gamma":1.0,"N":512,"arcs":4})",
        out_root, "c10_ortho"));
    const json& s = m.at("summary");
    const double distant = s.at("max_distant_hs_change").get<double>();
    const double drop = s.at("min_adjacent_drop").get<double>();
    const double control = s.at("min_control_ratio").get<double>();
    add(10, "asymptotic orthogonality",
        distant <= 0.10 && drop >= 0.25 && control >= 0.50,
        format_params("distant HS change=%.3f, adjacent drop=%.3f, control=%.3f",
                      distant, drop, control));
  });

  from_checks(11, "compact-support decay", [&](const json& s) {
    const double ratio = s.at("decay_slope_ratio").get<double>();
    add(11, "compact-support decay", ratio >= 0.9 && ratio <= 1.1,
        format_params("slope over 2 log(1-delta)=%.4f", ratio));
  });

  guarded(12, "banded corollary", [&] {
    const json tri = manifest_after(acceptance_config(
        R"({"schema_version":1,"kind":"banded","gamma":1.0,"N":20000,
            "band":{"coefficients":[1,2,1]}})",
        out_root, "c12_banded_tri"));
    const json& s = tri.at("summary");
    const double at_lo = s.at("scaled_at_probe_lo").get<double>();
    const double at_hi = s.at("scaled_at_probe_hi").get<double>();
    const bool sturm = s.at("path") == "sturm";

    const json diag = manifest_after(acceptance_config(
        R"({"schema_version":1,"kind":"banded","gamma":1.0,"N":4096,
            "band":{"coefficients":[0,3,0]}})",
        out_root, "c12_banded_diag"));
    const double dev = diag.at("summary").at("diag_analytic_max_dev").get<double>();

    add(12, "banded corollary",
        sturm && at_hi > at_lo && at_hi >= 2.0 && at_hi <= 4.5 && dev <= 1e-10,
        format_params("scaled 1e2->1e3: %.3f -> %.3f (band [2.0, 4.5]), "
                      "diag dev=%.3g",
                      at_lo, at_hi, dev));
  });

  guarded(13, "power-weight comparison", [&] {
    const json m = manifest_after(acceptance_config(
        R"({"schema_version":1,"kind":"pushnitski-compare","gamma":1.0,
            "n_grid":[10,100,1000,10000,100000]})",
        out_root, "c13_pushnitski"));
    const double dev = m.at("summary").at("final_rel_dev").get<double>();
    add(13, "power-weight comparison", dev <= 0.02,
        format_params("n s_n vs 1/2: rel dev=%.3g at n=1e5", dev));
  });

  guarded(14, "truncation stability", [&] {
    const char* base =
        R"({"schema_version":1,"kind":"theorem1","gamma":1.0,
            "symbol":{"type":"trig","coefficients":[0.5,2,0.5]}})";
    json j1 = json::parse(base);
    j1["N"] = 1024;
    json j2 = json::parse(base);
    j2["N"] = 2048;
    j1["out_dir"] = (out_root / "c14_stability_1024").string();
    j2["out_dir"] = (out_root / "c14_stability_2048").string();
    const ExperimentConfig c1 = parse_config(j1);
    const double band = c1.tol("stability_band");
    const json m1 = manifest_after(c1);
    const json m2 = manifest_after(parse_config(j2));
    const auto a = m1.at("summary").at("leading_singular_values").get<std::vector<double>>();
    const auto b = m2.at("summary").at("leading_singular_values").get<std::vector<double>>();
    double worst = 0.0;
    for (std::size_t i = 0; i < 64; ++i)
      worst = std::max(worst, std::abs(a.at(i) - b.at(i)) / b.at(i));
    add(14, "truncation stability", worst <= band,
        format_params("max rel dev over leading 64: %.4f", worst));
  });

  return results;
}

}  // namespace toeplab
