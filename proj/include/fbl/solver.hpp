// Minimization of the discrete functional by (eps, mu) continuation with a
// diagonally preconditioned Polak-Ribiere+ descent and Armijo backtracking,
// plus G-harmonic replacement solves on subrectangles, the discrete weak
// Euler-Lagrange residual, and an exhaustive oracle for tiny instances.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fbl/problem.hpp"

namespace fbl {

struct SolveOptions {
  // Empty schedules mean defaults: eps = {1e-1..1e-6}*scale by factor 10
  // (collapsed to {1e-6*scale} when lambda_+ = 0, where chi vanishes), and
  // mu = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 0}*scale inside each eps stage.
  std::vector<double> eps_schedule;
  std::vector<double> mu_schedule;
  int max_iters = 20000;          // per stage
  double energy_tol = 1e-10;      // relative stagnation tolerance
  double grad_tol_factor = 1e-8;  // grad max-norm tolerance = factor * scale
  std::uint64_t seed = 0;
  int multistart = -1;  // -1 auto (on for lambda_+ > 0 or theta0 < 0), 0 off, 1 on
};

struct StageTrace {
  double eps = 0.0;
  double mu = 0.0;
  int iterations = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
};

struct Solution {
  Field field;
  double energy = 0.0;  // evaluated at the final (eps, mu) of the schedule
  std::vector<StageTrace> stages;
  bool converged = false;
};

// Resolved schedules for a given problem (exposed so oracles and probes can
// evaluate at the same final smoothing parameters).
std::vector<double> resolved_eps_schedule(const Problem& p, const SolveOptions& o);
std::vector<double> resolved_mu_schedule(const Problem& p, const SolveOptions& o);

Solution minimize(const Problem& p, const SolveOptions& opts);

// Minimizer of sum |cell| G(|grad v|) on the full grid with the boundary
// rows/columns of `boundary` as data. 1D reduces to the affine interpolant.
Field g_harmonic_extension(const OrliczFunction& growth, const Grid& grid,
                           const Field& boundary, const SolveOptions& opts);

// Axis-aligned node box, inclusive index bounds (j fields ignored in 1D).
struct NodeBox {
  int i0 = 0, i1 = 0, j0 = 0, j1 = 0;
};

// G-harmonic solve on the subgrid spanned by `box`, with trace values taken
// from `trace_source` on the box boundary. The returned field lives on the
// subgrid; satisfies the discrete maximum principle up to solver tolerance.
Field solve_g_harmonic(const OrliczFunction& growth, const Field& trace_source,
                       NodeBox box, const SolveOptions& opts);

// Max-norm (and per-node values) of the unsmoothed first variation (mu = 0,
// indicator term dropped) over interior nodes whose incident cells lie
// entirely in {u > threshold}. Throws when no node qualifies.
std::pair<double, Field> el_residual(const Problem& p, const Field& u, double threshold);

// Exhaustive search over interior nodal values drawn from `levels`,
// evaluated at the final (eps, mu) of the default schedules. Preconditions:
// <= 8 interior nodes, <= 12 levels, <= 1e8 states.
Solution brute_force_minimize(const Problem& p, const std::vector<double>& levels);

}  // namespace fbl
