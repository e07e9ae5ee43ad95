// Config-driven experiment runs: structural verification, solves with
// probes, parameter sweeps, and brute-force oracle comparisons. Shared by
// the command-line tool and the tests.
#pragma once

#include <cstdint>
#include <string>

#include "fbl/config.hpp"
#include "fbl/problem.hpp"
#include "fbl/solver.hpp"

namespace fbl {

struct RunOptions {
  std::string out_dir = "out";
  bool deterministic = false;  // zero recorded timings in outputs
  int jobs = 1;                // sweep worker threads
  std::uint64_t seed = 0;      // overrides the config seed when seed_set
  bool seed_set = false;
};

// Exit codes follow the tool contract: 0 all green, 1 ran but a criterion
// failed, 2 invalid input. Input-shaped exceptions (ConfigError,
// std::invalid_argument) propagate for the caller to map to 2.
int run_verify(const std::string& growth_catalog, const std::string& absorption_catalog,
               double claimed_delta0, double claimed_g0, const RunOptions& ro);
int run_solve(const ConfigFile& cfg, const RunOptions& ro);
int run_probe(const ConfigFile& cfg, const RunOptions& ro);
int run_sweep(const ConfigFile& cfg, const RunOptions& ro);
int run_oracle(const ConfigFile& cfg, const RunOptions& ro);

Problem problem_from_config(const ConfigFile& cfg);
SolveOptions solve_options_from_config(const ConfigFile& cfg);

// Hypothesis-appropriate predicted growth exponent: 1 under cavitation,
// min of the exponent candidates otherwise (the h-driven candidate enters
// only when the h field is not identically zero). NaN when no absorption
// term is present or theta0 >= delta0.
double predicted_growth_exponent(const Problem& p);

}  // namespace fbl
