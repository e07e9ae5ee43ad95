#include "fbl/probes.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace fbl {
namespace {

constexpr double pi = std::numbers::pi;

double uniform01(std::mt19937_64& rng) {
  // Identical across platforms, unlike the distribution classes.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double cell_gradient_magnitude(const Field& u, int ci, int cj) {
  double gx, gy;
  cell_gradient(u, ci, cj, &gx, &gy);
  return std::hypot(gx, gy);
}

double grid_floor_h(const Grid& g) {
  return g.dim() == 2 ? std::max(g.hx, g.hy) : g.hx;
}

// Multilinear interpolation of the nodal field at a point inside the domain
// closure. The discrete field stands for its P1/Q1 interpolant, so ball sups
// evaluate this rather than snapping to the nearest node.
double interpolate(const Field& u, double x, double y) {
  const Grid& g = u.grid;
  const double fx =
      std::clamp((x - g.domain.x_lo) / g.hx, 0.0, static_cast<double>(g.nx - 1));
  const int i0 = std::min(static_cast<int>(fx), g.nx - 2);
  const double tx = fx - i0;
  if (g.dim() == 1) return (1.0 - tx) * u.at(i0, 0) + tx * u.at(i0 + 1, 0);
  const double fy =
      std::clamp((y - g.domain.y_lo) / g.hy, 0.0, static_cast<double>(g.ny - 1));
  const int j0 = std::min(static_cast<int>(fy), g.ny - 2);
  const double ty = fy - j0;
  return (1.0 - tx) * (1.0 - ty) * u.at(i0, j0) + tx * (1.0 - ty) * u.at(i0 + 1, j0) +
         (1.0 - tx) * ty * u.at(i0, j0 + 1) + tx * ty * u.at(i0 + 1, j0 + 1);
}

}  // namespace

std::vector<BoundaryPoint> extract_free_boundary(const Field& u, double threshold) {
  const Grid& g = u.grid;
  std::vector<BoundaryPoint> points;
  auto edge = [&](int i0, int j0, int i1, int j1) {
    const double a = u.at(i0, j0) - threshold;
    const double b = u.at(i1, j1) - threshold;
    if ((a > 0.0) == (b > 0.0)) return;
    const double t = a / (a - b);
    points.push_back({g.x(i0) + t * (g.x(i1) - g.x(i0)),
                      g.y(j0) + t * (g.y(j1) - g.y(j0))});
  };
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i + 1 < g.nx; ++i) edge(i, j, i + 1, j);
  if (g.dim() == 2)
    for (int j = 0; j + 1 < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) edge(i, j, i, j + 1);
  return points;
}

GrowthFit dyadic_sup(const Field& u, double x0, double y0, double r0, int j_max,
                     GrowthTarget target) {
  const Grid& g = u.grid;
  const Domain& dom = g.domain;
  const bool two_d = g.dim() == 2;
  if (x0 < dom.x_lo || x0 > dom.x_hi || (two_d && (y0 < dom.y_lo || y0 > dom.y_hi)))
    throw std::invalid_argument("dyadic_sup: center outside the domain");
  if (!(r0 > 0.0) || j_max < 0)
    throw std::invalid_argument("dyadic_sup: need r0 > 0 and j_max >= 0");
  const double floor_h = grid_floor_h(g);
  if (std::ldexp(r0, -j_max) < floor_h)
    throw std::invalid_argument("dyadic_sup: smallest radius underflows the grid spacing");

  GrowthFit fit;
  fit.x0 = x0;
  fit.y0 = two_d ? y0 : 0.0;
  fit.r0 = r0;
  fit.target = target;
  fit.grid_h = floor_h;
  for (int j = 0; j <= j_max; ++j) {
    const double radius = std::ldexp(r0, -j);
    double sup = 0.0;
    if (target == GrowthTarget::value) {
      for (int nj = 0; nj < g.ny; ++nj)
        for (int ni = 0; ni < g.nx; ++ni) {
          const double dist = std::hypot(g.x(ni) - x0, two_d ? g.y(nj) - y0 : 0.0);
          if (dist <= radius) sup = std::max(sup, std::fabs(u.at(ni, nj)));
        }
      // The interpolant can peak on the ball boundary between nodes; skipping
      // it biases each level low by up to slope * h, which skews the fitted
      // exponent once radii approach the cell size.
      if (!two_d) {
        for (const double ex : {x0 - radius, x0 + radius})
          if (ex >= dom.x_lo && ex <= dom.x_hi)
            sup = std::max(sup, std::fabs(interpolate(u, ex, 0.0)));
      } else {
        const int samples = static_cast<int>(std::clamp(
            std::ceil(4.0 * pi * radius / floor_h), 16.0, 8192.0));
        for (int k = 0; k < samples; ++k) {
          const double theta = 2.0 * pi * k / samples;
          const double ex = x0 + radius * std::cos(theta);
          const double ey = y0 + radius * std::sin(theta);
          if (ex < dom.x_lo || ex > dom.x_hi || ey < dom.y_lo || ey > dom.y_hi) continue;
          sup = std::max(sup, std::fabs(interpolate(u, ex, ey)));
        }
      }
    } else {
      for (int cj = 0; cj < g.cell_ny(); ++cj)
        for (int ci = 0; ci < g.cell_nx(); ++ci) {
          const double cx = g.x(ci) + 0.5 * g.hx;
          const double cy = two_d ? g.y(cj) + 0.5 * g.hy : 0.0;
          const double dist = std::hypot(cx - x0, two_d ? cy - y0 : 0.0);
          if (dist <= radius) sup = std::max(sup, cell_gradient_magnitude(u, ci, cj));
        }
    }
    fit.radii.push_back(radius);
    fit.sup_values.push_back(sup);
  }
  return fit;
}

GrowthFit fit_growth_exponent(GrowthFit fit, double value_floor) {
  // Radii decrease and S is nonincreasing, so both cuts trim a suffix and
  // the usable window stays contiguous from level 0.
  int usable = 0;
  while (usable < static_cast<int>(fit.radii.size())) {
    const double r = fit.radii[static_cast<std::size_t>(usable)];
    const double s = fit.sup_values[static_cast<std::size_t>(usable)];
    if (r < 4.0 * fit.grid_h || s < value_floor || !(s > 0.0)) break;
    ++usable;
  }
  if (usable < 4)
    throw std::runtime_error("fit_growth_exponent: fewer than 4 usable levels (have " +
                             std::to_string(usable) + ")");
  fit.window_lo = 0;
  fit.window_hi = usable - 1;

  double sx = 0.0, sy = 0.0;
  for (int j = 0; j < usable; ++j) {
    sx += std::log(fit.radii[static_cast<std::size_t>(j)]);
    sy += std::log(fit.sup_values[static_cast<std::size_t>(j)]);
  }
  const double mx = sx / usable, my = sy / usable;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int j = 0; j < usable; ++j) {
    const double dx = std::log(fit.radii[static_cast<std::size_t>(j)]) - mx;
    const double dy = std::log(fit.sup_values[static_cast<std::size_t>(j)]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  fit.fitted_exponent = sxy / sxx;
  fit.fitted_constant = std::exp(my - fit.fitted_exponent * mx);
  const double ss_res = syy - sxy * sxy / sxx;
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

ModulusReport modulus_probe(const Field& u, const Rect& omega_prime,
                            const std::vector<double>& alphas, std::uint64_t seed) {
  const Grid& g = u.grid;
  const Domain& dom = g.domain;
  const bool two_d = g.dim() == 2;
  if (omega_prime.x_hi <= omega_prime.x_lo ||
      (two_d && omega_prime.y_hi <= omega_prime.y_lo))
    throw std::invalid_argument("modulus_probe: empty window");

  double margin = std::min(omega_prime.x_lo - dom.x_lo, dom.x_hi - omega_prime.x_hi);
  if (two_d)
    margin = std::min({margin, omega_prime.y_lo - dom.y_lo, dom.y_hi - omega_prime.y_hi});
  if (margin < 2.0 * grid_floor_h(g) - 1e-12)
    throw std::invalid_argument(
        "modulus_probe: window must keep a margin of at least 2h to the boundary");

  std::vector<int> nodes;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (g.x(i) < omega_prime.x_lo || g.x(i) > omega_prime.x_hi) continue;
      if (two_d && (g.y(j) < omega_prime.y_lo || g.y(j) > omega_prime.y_hi)) continue;
      nodes.push_back(g.index(i, j));
    }
  if (nodes.size() < 2)
    throw std::invalid_argument("modulus_probe: window contains fewer than 2 nodes");

  ModulusReport report;
  report.margin = margin;
  for (double a : alphas) report.holder.emplace_back(a, 0.0);

  for (int cj = 0; cj < g.cell_ny(); ++cj)
    for (int ci = 0; ci < g.cell_nx(); ++ci) {
      const double cx = g.x(ci) + 0.5 * g.hx;
      const double cy = two_d ? g.y(cj) + 0.5 * g.hy : 0.0;
      if (cx < omega_prime.x_lo || cx > omega_prime.x_hi) continue;
      if (two_d && (cy < omega_prime.y_lo || cy > omega_prime.y_hi)) continue;
      report.lipschitz = std::max(report.lipschitz, cell_gradient_magnitude(u, ci, cj));
    }

  auto take_pair = [&](int i0, int j0, int i1, int j1) {
    const double d = std::hypot(g.x(i1) - g.x(i0), two_d ? g.y(j1) - g.y(j0) : 0.0);
    if (!(d > 0.0)) return;
    const double diff = std::fabs(u.at(i1, j1) - u.at(i0, j0));
    constexpr double inv_e = 0.36787944117144233;  // |log d| only meaningful below 1/e
    if (d < inv_e)
      report.log_lipschitz = std::max(report.log_lipschitz, diff / (d * -std::log(d)));
    for (auto& [alpha, semi] : report.holder)
      semi = std::max(semi, diff / std::pow(d, alpha));
    ++report.pair_count;
  };

  auto inside = [&](int i, int j) {
    if (g.x(i) < omega_prime.x_lo || g.x(i) > omega_prime.x_hi) return false;
    if (two_d && (g.y(j) < omega_prime.y_lo || g.y(j) > omega_prime.y_hi)) return false;
    return true;
  };

  for (int node : nodes) {
    const int i = node % g.nx;
    const int j = node / g.nx;
    for (int step = 1; i + step < g.nx && inside(i + step, j); step *= 2)
      take_pair(i, j, i + step, j);
    if (two_d)
      for (int step = 1; j + step < g.ny && inside(i, j + step); step *= 2)
        take_pair(i, j, i, j + step);
  }

  std::mt19937_64 rng(seed);
  for (int k = 0; k < 10000; ++k) {
    const auto pick = [&] {
      const std::size_t idx = std::min(
          nodes.size() - 1, static_cast<std::size_t>(uniform01(rng) * nodes.size()));
      return nodes[idx];
    };
    const int a = pick();
    const int b = pick();
    if (a == b) continue;
    take_pair(a % g.nx, a / g.nx, b % g.nx, b / g.nx);
  }
  return report;
}

double harnack_ratio(const Field& u, double cx, double cy, double r, double R,
                     const OrliczFunction& growth) {
  const Grid& g = u.grid;
  const Domain& dom = g.domain;
  const bool two_d = g.dim() == 2;
  if (!(r > 0.0) || r > R) throw std::invalid_argument("harnack_ratio: need 0 < r <= R");
  if (cx - R < dom.x_lo || cx + R > dom.x_hi ||
      (two_d && (cy - R < dom.y_lo || cy + R > dom.y_hi)))
    throw std::invalid_argument("harnack_ratio: B_R sticks out of the domain");

  double sup_r = -std::numeric_limits<double>::infinity();
  double inf_r = std::numeric_limits<double>::infinity();
  bool any_inner = false;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double dist = std::hypot(g.x(i) - cx, two_d ? g.y(j) - cy : 0.0);
      if (dist > R) continue;
      const double v = u.at(i, j);
      if (v < 0.0)
        throw std::runtime_error("harnack_ratio: negative value inside B_R at node (" +
                                 std::to_string(i) + "," + std::to_string(j) + ")");
      if (dist <= r) {
        sup_r = std::max(sup_r, v);
        inf_r = std::min(inf_r, v);
        any_inner = true;
      }
    }
  if (!any_inner) throw std::invalid_argument("harnack_ratio: B_r contains no node");
  return sup_r / (inf_r + invert_g(growth, R) * R);
}

IterationCheck degiorgi_iterate(double c, double d, double xi, double j0, int n_max,
                                double threshold_override) {
  if (!(c > 0.0) || !(d > 0.0) || !(xi > 0.0) || !(j0 >= 0.0) || n_max < 1)
    throw std::invalid_argument("degiorgi_iterate: need c, d, xi > 0, j0 >= 0, n_max >= 1");
  IterationCheck check;
  check.c = c;
  check.d = d;
  check.xi = xi;
  check.threshold = threshold_override >= 0.0
                        ? threshold_override
                        : std::pow(c, -1.0 / xi) * std::pow(d, -1.0 / (xi * xi));
  check.below_threshold = j0 <= check.threshold;
  check.trace.push_back(j0);
  double jn = j0;
  for (int n = 0; n < n_max; ++n) {
    jn = c * std::pow(d, static_cast<double>(n)) * std::pow(jn, 1.0 + xi);
    check.trace.push_back(jn);
    if (!std::isfinite(jn) || jn > 1e200) {
      check.overflow_index = n + 1;
      break;
    }
  }
  check.converged = check.overflow_index < 0 && check.trace.back() < 1e-30;
  return check;
}

IterationCheck degiorgi_verify_bound(double c, double d, double xi,
                                     const std::vector<double>& sequence) {
  if (!(c > 0.0) || !(d > 0.0) || !(xi > 0.0) || sequence.empty())
    throw std::invalid_argument("degiorgi_verify_bound: need c, d, xi > 0 and a sequence");
  IterationCheck check;
  check.c = c;
  check.d = d;
  check.xi = xi;
  check.threshold = std::pow(c, -1.0 / xi) * std::pow(d, -1.0 / (xi * xi));
  check.below_threshold = sequence.front() <= check.threshold;
  check.trace = sequence;
  for (std::size_t n = 0; n + 1 < sequence.size(); ++n) {
    const double bound = c * std::pow(d, static_cast<double>(n)) *
                         std::pow(sequence[n], 1.0 + xi);
    if (!(sequence[n + 1] <= bound * (1.0 + 1e-12))) {
      check.bound_satisfied = false;
      break;
    }
  }
  check.converged = check.trace.back() < 1e-30;
  return check;
}

ReplacementReport energy_comparison_check(const OrliczFunction& growth, const Field& u,
                                          NodeBox region, double lambda,
                                          const SolveOptions& inner_opts) {
  const Grid& g = u.grid;
  const bool two_d = g.dim() == 2;
  if (!(lambda > 0.0) || lambda >= static_cast<double>(g.dim()))
    throw std::invalid_argument("energy_comparison_check: lambda must lie in (0, dim)");

  Field v = solve_g_harmonic(growth, u, region, inner_opts);
  if (!two_d) {
    region.j0 = 0;
    region.j1 = 0;
  }
  Field restricted(v.grid);
  for (int j = region.j0; j <= region.j1; ++j)
    for (int i = region.i0; i <= region.i1; ++i)
      restricted.at(i - region.i0, j - region.j0) = u.at(i, j);

  Problem gr;
  gr.grid = v.grid;
  gr.growth = std::shared_ptr<const OrliczFunction>(&growth, [](const OrliczFunction*) {});
  gr.dirichlet = restricted;
  gr.mu_reg = 0.0;
  gr.set_constant_coefficients(0.0, 0.0);

  Field diff(v.grid);
  for (std::size_t k = 0; k < diff.v.size(); ++k) diff.v[k] = restricted.v[k] - v.v[k];

  ReplacementReport report;
  report.lhs = energy(gr, diff);
  const double e_u = energy(gr, restricted);
  const double e_v = energy(gr, v);
  report.gap = e_u - e_v;
  const double half_x = 0.5 * (g.x(region.i1) - g.x(region.i0));
  const double half_y = two_d ? 0.5 * (g.y(region.j1) - g.y(region.j0)) : 0.0;
  report.region_radius = std::max(half_x, half_y);
  report.tail = std::pow(report.region_radius, 0.5 * lambda) *
                std::sqrt(std::max(report.gap, 0.0));
  // At roundoff scale the comparison is vacuous (u was already G-harmonic).
  if (report.lhs <= 1e-12 * std::max(e_u, 1e-300))
    report.empirical_c = 0.0;
  else
    report.empirical_c = report.lhs / report.gap;
  return report;
}

NonnegativityReport nonnegativity_check(const Field& u, double tol) {
  const Grid& g = u.grid;
  NonnegativityReport report;
  report.min_value = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (u.at(i, j) < report.min_value) {
        report.min_value = u.at(i, j);
        report.node_i = i;
        report.node_j = j;
        report.x = g.x(i);
        report.y = g.y(j);
      }
  report.passed = report.min_value >= -tol;
  return report;
}

}  // namespace fbl
