// Sampled verification of the structural inequalities satisfied by an Orlicz
// growth function and an absorption nonlinearity: the exponent pinch for g
// and F, power-law comparison bounds, subadditivity-type bounds, the Young
// inequality against the conjugate, the bounded-variation condition on
// Q(s) = s g'(s)/g(s), and the predicted growth exponent p0.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "fbl/orlicz.hpp"

namespace fbl {

struct PropertyReport {
  std::string property;
  long samples = 0;
  bool passed = false;
  // Smallest relative margin (rhs-lhs)/max(|lhs|,|rhs|) seen; >= -tol passes.
  double worst_margin = 0.0;
  double witness_t = 0.0;  // t (or a) component of the worst sample
  double witness_s = 0.0;  // s (or b) component; 0 for single-variable checks
};

struct SampleSpec {
  double t_lo = 1e-6;
  double t_hi = 1e6;
  int log_count = 1024;   // log-spaced t samples
  int pair_axis = 64;     // pair checks use a pair_axis x pair_axis log grid
  int random_count = 1000;
  std::uint64_t seed = 20240809;
  double tol = 1e-9;      // relative margin tolerance
};

// One report per property. Single-variable checks run on the log grid plus
// random points; two-variable checks on the pair grid plus random pairs.
// The ratio decay check f/g, F/G along a log-spaced tail from t = 10 is
// emitted only when theta0 < delta0 and f0 < delta0. Deterministic for a
// fixed spec.
std::vector<PropertyReport> verify_structure(const OrliczFunction& fn,
                                             const Nonlinearity* nl,
                                             const SampleSpec& spec);

struct QVariationReport {
  double c0_hat = 0.0;       // smallest c0 covering all samples
  bool passed = false;       // vs. the caller's budget (always true when budget <= 0)
  double worst_t = 0.0;
  double worst_k = 0.0;
  long samples = 0;
};

// Checks total variation of Q over [t, t+k] against c0 * (k/t)^tau on a log
// grid of t in [1e-3, 1e3] with k in [1e-3*t, 10*t]. The variation integral
// is evaluated as a refined sum of |Q increments| (no symbolic derivative).
QVariationReport verify_q_variation(const OrliczFunction& fn, double tau,
                                    double c0_budget = 0.0, int t_count = 25,
                                    int k_count = 5, int refine_limit = 4096);

// Growth exponent candidates {(1+g0)/(g0-theta0), (1+delta0)/(delta0-theta0),
// (1+g0)/g0}; the third candidate enters only through a nonzero h term.
std::array<double, 3> p0_candidates(double delta0, double g0, double theta0);

// min of the candidates when lambda_plus = 0, and 1 under cavitation.
// Throws std::domain_error unless theta0 < delta0 <= g0.
double p0_exponent(double delta0, double g0, double theta0, bool cavitation);

}  // namespace fbl
