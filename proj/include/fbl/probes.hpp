// Measurement instruments for solved fields: free-boundary extraction,
// dyadic growth-rate fits, regularity moduli, Harnack ratios, the truncation
// iteration checker, replacement energy comparisons, and sign certificates.
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fbl/problem.hpp"
#include "fbl/solver.hpp"

namespace fbl {

struct BoundaryPoint {
  double x = 0.0, y = 0.0;
};

// Grid-edge crossings of the level {u = threshold}, located by linear
// interpolation along edges whose endpoints straddle the threshold.
std::vector<BoundaryPoint> extract_free_boundary(const Field& u, double threshold);

enum class GrowthTarget { value, gradient };

struct GrowthFit {
  double x0 = 0.0, y0 = 0.0;
  double r0 = 0.0;
  GrowthTarget target = GrowthTarget::value;
  double grid_h = 0.0;              // max axis spacing; fits drop radii < 4*grid_h
  std::vector<double> radii;        // 2^{-j} r0, j = 0..j_max
  std::vector<double> sup_values;   // S(j), nonincreasing in j
  double fitted_exponent = 0.0;
  double fitted_constant = 0.0;     // C in S ~ C r^exponent
  double r_squared = 0.0;
  int window_lo = 0, window_hi = -1;  // inclusive level range used by the fit
};

// S(j) = max |u| over nodes within distance 2^{-j} r0 of (x0, y0) for the
// value target; for the gradient target, max cell |grad u| over cells whose
// center lies in the ball. Balls are clipped to the grid, so centers on the
// domain boundary are legal.
GrowthFit dyadic_sup(const Field& u, double x0, double y0, double r0, int j_max,
                     GrowthTarget target = GrowthTarget::value);

// Least squares of log S against log r over the usable window (radius at
// least 4*grid_h, S at least value_floor). Throws when fewer than 4 levels
// survive the cuts.
GrowthFit fit_growth_exponent(GrowthFit fit, double value_floor);

struct Rect {
  double x_lo = 0.0, x_hi = 0.0;
  double y_lo = 0.0, y_hi = 0.0;  // ignored in 1D
};

struct ModulusReport {
  double lipschitz = 0.0;      // max cell |grad u| over cells centered in the window
  double log_lipschitz = 0.0;  // sup |du| / (d |log d|) over pairs with d < 1/e
  std::vector<std::pair<double, double>> holder;  // (alpha, sup |du| / d^alpha)
  double margin = 0.0;         // distance from the window to the domain boundary
  std::size_t pair_count = 0;
};

// Moduli over the interior window: dyadic axis pairs from every window node
// plus 10^4 seeded random node pairs. The window must keep a margin of at
// least 2h to the domain boundary.
ModulusReport modulus_probe(const Field& u, const Rect& omega_prime,
                            const std::vector<double>& alphas,
                            std::uint64_t seed = 20240809);

// sup_{B_r} u / (inf_{B_r} u + g^{-1}(R) R). Requires u >= 0 on B_R and
// B_R inside the domain; balls are node sets by center distance.
double harnack_ratio(const Field& u, double cx, double cy, double r, double R,
                     const OrliczFunction& growth);

struct IterationCheck {
  double c = 0.0, d = 0.0, xi = 0.0;
  double threshold = 0.0;  // C^{-1/xi} D^{-1/xi^2} unless overridden
  bool below_threshold = false;
  std::vector<double> trace;
  bool converged = false;       // final trace value < 1e-30, no overflow
  bool bound_satisfied = true;  // meaningful for the bound-checking variant
  int overflow_index = -1;      // first index exceeding 1e200, -1 if none
};

// Iterates J_{n+1} = c d^n J_n^{1+xi} for n_max steps. The threshold is
// reported (and compared against j0) but does not influence the iteration;
// pass a non-default value to test an alternative threshold reading.
IterationCheck degiorgi_iterate(double c, double d, double xi, double j0, int n_max,
                                double threshold_override = -1.0);

// Verifies a supplied sequence obeys J_{n+1} <= c d^n J_n^{1+xi} termwise.
IterationCheck degiorgi_verify_bound(double c, double d, double xi,
                                     const std::vector<double>& sequence);

struct ReplacementReport {
  double lhs = 0.0;          // sum |cell| G(|grad(u - v)|) over the region
  double gap = 0.0;          // sum |cell| G(|grad u|) - sum |cell| G(|grad v|)
  double tail = 0.0;         // R^{lambda/2} sqrt(max(gap, 0))
  double empirical_c = 0.0;  // lhs / gap; 0 when lhs sits at roundoff scale
  double region_radius = 0.0;
};

// Replaces u on the region by the G-harmonic field with the same trace and
// compares gradient energies (all at mu = 0). lambda must lie in (0, dim).
ReplacementReport energy_comparison_check(const OrliczFunction& growth, const Field& u,
                                          NodeBox region, double lambda,
                                          const SolveOptions& inner_opts);

struct NonnegativityReport {
  bool passed = true;
  double min_value = 0.0;
  int node_i = 0, node_j = 0;
  double x = 0.0, y = 0.0;
};

NonnegativityReport nonnegativity_check(const Field& u, double tol);

}  // namespace fbl
