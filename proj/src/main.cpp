#include <cstdio>
#include <exception>
#include <limits>
#include <string>

#include <CLI11.hpp>

#include "fbl/config.hpp"
#include "fbl/runner.hpp"

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fblab: a desk-scale laboratory for free-boundary Orlicz minimization"};
  app.require_subcommand(1);
  app.fallthrough();

  fbl::RunOptions ro;
  app.add_option("--out", ro.out_dir, "Output directory (created if missing)");
  app.add_flag("--deterministic", ro.deterministic,
               "Zero recorded timings so reruns are bit-identical");
  app.add_option("--jobs", ro.jobs, "Worker threads for sweep rows")
      ->check(CLI::Range(1, 64));
  std::uint64_t seed = 0;
  CLI::Option* seed_opt =
      app.add_option("--seed", seed, "Override the solver seed from the config");

  std::string growth_catalog;
  std::string absorption_catalog;
  double claimed_delta0 = kNaN;
  double claimed_g0 = kNaN;
  CLI::App* verify = app.add_subcommand(
      "verify", "Check the structural inequalities of a catalog entry");
  verify->add_option("--fn", growth_catalog, "Growth catalog string, e.g. plap:2")
      ->required();
  verify->add_option("--nl", absorption_catalog,
                     "Absorption catalog string, e.g. power-F:1.5 (default none)");
  verify->add_option("--delta0", claimed_delta0, "Override the claimed lower exponent");
  verify->add_option("--g0", claimed_g0, "Override the claimed upper exponent");

  std::string config_path;
  CLI::App* solve = app.add_subcommand("solve", "Minimize the configured functional");
  CLI::App* probe = app.add_subcommand("probe", "Solve, then run the configured probes");
  CLI::App* sweep = app.add_subcommand("sweep", "Solve over a grid of config overrides");
  CLI::App* oracle = app.add_subcommand(
      "oracle", "Compare the solver against exhaustive enumeration on a tiny instance");
  for (CLI::App* sub : {solve, probe, sweep, oracle})
    sub->add_option("--config", config_path, "Config file path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  ro.seed = seed;
  ro.seed_set = seed_opt->count() > 0;

  try {
    if (verify->parsed())
      return fbl::run_verify(growth_catalog, absorption_catalog, claimed_delta0,
                             claimed_g0, ro);
    const fbl::ConfigFile cfg = fbl::ConfigFile::load(config_path);
    if (solve->parsed()) return fbl::run_solve(cfg, ro);
    if (probe->parsed()) return fbl::run_probe(cfg, ro);
    if (sweep->parsed()) return fbl::run_sweep(cfg, ro);
    if (oracle->parsed()) return fbl::run_oracle(cfg, ro);
  } catch (const fbl::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
