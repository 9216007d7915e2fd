// Command line front end.
//
//   toeplab run <config.json>       execute one experiment, exit 0 iff pass
//   toeplab validate <config.json>  parse and echo the resolved settings
//   toeplab suite acceptance        run the pinned acceptance battery
//
// Overrides given on the command line are folded into the config before the
// run so the manifest echo stays truthful.  Timings go to stdout only; files
// under out_dir depend on nothing but config and seed.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "toeplab/acceptance.hpp"
#include "toeplab/config.hpp"
#include "toeplab/runners.hpp"

namespace {

struct Overrides {
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 0;
};

void apply(const Overrides& o, toeplab::ExperimentConfig& c) {
  if (!o.out_dir.empty()) {
    c.out_dir = o.out_dir;
    c.echo["out_dir"] = o.out_dir;
  }
  if (o.seed_set) {
    c.seed = o.seed;
    c.echo["seed"] = o.seed;
  }
}

int do_run(const std::string& path, const Overrides& o) {
  toeplab::ExperimentConfig c = toeplab::load_config(path);
  apply(o, c);
  const toeplab::RunReport r = toeplab::run_experiment(c);

  std::printf("kind: %s\n", r.kind.c_str());
  std::printf("out_dir: %s\n", r.out_dir.c_str());
  for (const auto& [stage, seconds] : r.timings)
    std::printf("  %-12s %8.3f s\n", stage.c_str(), seconds);
  for (const auto& f : r.files)
    std::printf("  wrote %s\n", f.c_str());
  std::printf("%s\n", r.pass ? "PASS" : "FAIL");
  return r.pass ? 0 : 1;
}

int do_validate(const std::string& path) {
  const toeplab::ExperimentConfig c = toeplab::load_config(path);
  std::printf("valid: kind=%s gamma=%g seed=%llu out_dir=%s\n",
              toeplab::kind_name(c.kind), c.gamma,
              static_cast<unsigned long long>(c.seed), c.out_dir.c_str());
  std::printf("%s\n", c.echo.dump(2).c_str());
  return 0;
}

int do_suite(const Overrides& o) {
  const std::string out_root = o.out_dir.empty() ? "acceptance_out" : o.out_dir;
  const auto results = toeplab::run_acceptance(out_root, [](const auto& r) {
    std::printf("C%02d %-4s %s (%s)\n", r.number, r.pass ? "PASS" : "FAIL",
                r.name.c_str(), r.detail.c_str());
    std::fflush(stdout);
  });
  std::size_t passed = 0;
  for (const auto& r : results)
    if (r.pass) ++passed;
  std::printf("acceptance: %zu/%zu criteria passed\n", passed, results.size());
  return passed == results.size() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Toeplitz spectral experiments on the weighted disk space"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  app.add_option("--out-dir", o.out_dir, "Override the configured output directory");
  auto* seed_opt =
      app.add_option("--seed", o.seed, "Override the configured random seed");
  app.add_option("--threads", o.threads, "Worker threads (0 = hardware default)")
      ->check(CLI::Range(0, 256));

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "Execute one experiment from a config");
  run->add_option("config", config_path, "Path to a JSON config")->required();

  std::string validate_path;
  CLI::App* validate =
      app.add_subcommand("validate", "Parse a config and echo the resolved settings");
  validate->add_option("config", validate_path, "Path to a JSON config")->required();

  std::string suite_name;
  CLI::App* suite = app.add_subcommand("suite", "Run a named batch of experiments");
  suite->add_option("name", suite_name, "Suite name (acceptance)")->required();

  CLI11_PARSE(app, argc, argv);
  o.seed_set = seed_opt->count() > 0;
  if (o.threads > 0) toeplab::set_thread_count(static_cast<unsigned>(o.threads));

  try {
    if (run->parsed()) return do_run(config_path, o);
    if (validate->parsed()) return do_validate(validate_path);
    if (suite->parsed()) {
      if (suite_name != "acceptance") {
        std::fprintf(stderr, "error: unknown suite '%s'\n", suite_name.c_str());
        return 2;
      }
      return do_suite(o);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
