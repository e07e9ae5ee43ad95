#include "fbl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fbl {
namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::fabs(v));
  return m;
}

// Diagonal of the Hessian of the quadratic model sum |cell| |grad u|^2.
// It does not depend on u, so one evaluation serves every stage.
std::vector<double> quadratic_diagonal(const Grid& grid) {
  std::vector<double> diag(static_cast<std::size_t>(grid.node_count()), 0.0);
  const double w = grid.cell_volume();
  if (grid.dim() == 1) {
    const double c = 2.0 * w / (grid.hx * grid.hx);
    for (int ci = 0; ci < grid.cell_nx(); ++ci) {
      diag[static_cast<std::size_t>(ci)] += c;
      diag[static_cast<std::size_t>(ci) + 1] += c;
    }
  } else {
    const double cx = 1.0 / (2.0 * grid.hx);
    const double cy = 1.0 / (2.0 * grid.hy);
    const double c = 2.0 * w * (cx * cx + cy * cy);
    for (int cj = 0; cj < grid.cell_ny(); ++cj) {
      for (int ci = 0; ci < grid.cell_nx(); ++ci) {
        diag[static_cast<std::size_t>(grid.index(ci, cj))] += c;
        diag[static_cast<std::size_t>(grid.index(ci + 1, cj))] += c;
        diag[static_cast<std::size_t>(grid.index(ci, cj + 1))] += c;
        diag[static_cast<std::size_t>(grid.index(ci + 1, cj + 1))] += c;
      }
    }
  }
  for (double& d : diag)
    if (!(d > 0.0)) d = 1.0;
  return diag;
}

struct StageResult {
  int iterations = 0;
  double energy = 0.0;
  double grad_norm = 0.0;
  bool grad_converged = false;
};

// Effective gradient and first-order stationarity measure. The smoothed
// indicator and the u+ cutoff leave the energy only piecewise C^1 in each
// nodal value, and minimizers generically sit exactly at a kink (e.g. the
// node where a cavitation ramp detaches), where the smooth-branch gradient
// cannot vanish. Nodes whose incident cells average within a small window
// of a kink are therefore judged by true-energy probes at scale delta: a
// node with no one-sided decrease is pinned (entry 0, so a blocked nodal
// gradient cannot poison the search direction), otherwise the entry is the
// signed best decrease rate. All other nodes keep their smooth gradient.
// Returns the max-norm of the effective gradient.
double effective_gradient(const Problem& p, const Field& u, const Field& grad,
                          Field& effective) {
  const Grid& g = p.grid;
  const double delta = 1e-6 * p.scale;
  const double window = 2.0 * delta;
  const bool has_chi = p.lambda_plus > 0.0;
  const bool has_F = p.absorption != nullptr;

  effective = grad;

  std::vector<char> kink_cell;
  if (has_chi || has_F) {
    kink_cell.assign(static_cast<std::size_t>(g.cell_count()), 0);
    for (int cj = 0; cj < g.cell_ny(); ++cj) {
      for (int ci = 0; ci < g.cell_nx(); ++ci) {
        const double ubar = cell_average(u, ci, cj);
        const int c = ci + cj * g.cell_nx();
        bool kink = false;
        if (has_chi && (std::fabs(ubar) <= window || std::fabs(ubar - p.eps_chi) <= window))
          kink = true;
        if (has_F && p.q_cell[static_cast<std::size_t>(c)] != 0.0 && std::fabs(ubar) <= window)
          kink = true;
        kink_cell[static_cast<std::size_t>(c)] = kink ? 1 : 0;
      }
    }
  }

  Field probe = u;
  double worst = 0.0;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.boundary_node(i, j)) continue;
      const int lo_ci = std::max(0, i - 1), hi_ci = std::min(g.cell_nx() - 1, i);
      const int lo_cj = g.dim() == 2 ? std::max(0, j - 1) : 0;
      const int hi_cj = g.dim() == 2 ? std::min(g.cell_ny() - 1, j) : 0;
      bool near_kink = false;
      if (!kink_cell.empty()) {
        for (int cj = lo_cj; cj <= hi_cj && !near_kink; ++cj)
          for (int ci = lo_ci; ci <= hi_ci && !near_kink; ++ci)
            near_kink = kink_cell[static_cast<std::size_t>(ci + cj * g.cell_nx())] != 0;
      }
      if (!near_kink) {
        worst = std::max(worst, std::fabs(grad.at(i, j)));
        continue;
      }
      double base = 0.0;
      for (int cj = lo_cj; cj <= hi_cj; ++cj)
        for (int ci = lo_ci; ci <= hi_ci; ++ci) base += cell_energy(p, probe, ci, cj);
      double rate_up = 0.0, rate_down = 0.0;
      for (double sign : {1.0, -1.0}) {
        probe.at(i, j) = u.at(i, j) + sign * delta;
        double shifted = 0.0;
        for (int cj = lo_cj; cj <= hi_cj; ++cj)
          for (int ci = lo_ci; ci <= hi_ci; ++ci) shifted += cell_energy(p, probe, ci, cj);
        (sign > 0.0 ? rate_up : rate_down) = (base - shifted) / delta;
      }
      probe.at(i, j) = u.at(i, j);
      const double best = std::max(rate_up, rate_down);
      if (best <= 0.0) {
        effective.at(i, j) = 0.0;
      } else {
        effective.at(i, j) = rate_up >= rate_down ? -best : best;
        worst = std::max(worst, best);
      }
    }
  }
  return worst;
}

// Preconditioned Polak-Ribiere+ descent with a one-secant step (exact on
// quadratic stages, so the plap(2) case reduces to preconditioned CG)
// followed by Armijo backtracking. Boundary entries of the gradient are
// zero, so the iteration never touches Dirichlet nodes.
//
// Warm-start stages exit early once the energy stagnates; the final stage
// keeps iterating, accepting steps by slope (approximate Wolfe) once energy
// differences fall below measurement, so the conjugate tail can push the
// gradient to tolerance past the energy roundoff plateau.
StageResult descend(const Problem& p, Field& u, const SolveOptions& opts,
                    const std::vector<double>& diag, bool final_stage) {
  const std::size_t n = u.v.size();
  const double grad_tol = opts.grad_tol_factor * p.scale;
  const double armijo = 1e-4;

  double current = energy(p, u);
  Field grad(u.grid);
  double gnorm = effective_gradient(p, u, energy_gradient(p, u), grad);

  std::vector<double> residual(n), precond(n), direction(n);
  for (std::size_t k = 0; k < n; ++k) {
    residual[k] = -grad.v[k];
    precond[k] = residual[k] / diag[k];
  }
  direction = precond;
  double rz = dot(residual, precond);

  Field trial = u;
  double step_seed = 1.0;
  int iter = 0;
  int stall = 0;
  bool steepest = true;
  while (iter < opts.max_iters && gnorm > grad_tol) {
    double slope0 = dot(grad.v, direction);
    if (!(slope0 < 0.0)) {
      direction = precond;
      steepest = true;
      slope0 = dot(grad.v, direction);
      if (!(slope0 < 0.0)) break;  // gradient numerically zero in this metric
    }

    double a0 = step_seed;
    double slope_a0 = std::numeric_limits<double>::quiet_NaN();
    Field scratch(u.grid);
    for (int shrink = 0; shrink < 60; ++shrink) {
      for (std::size_t k = 0; k < n; ++k) trial.v[k] = u.v[k] + a0 * direction[k];
      effective_gradient(p, trial, energy_gradient(p, trial), scratch);
      slope_a0 = dot(scratch.v, direction);
      if (std::isfinite(slope_a0)) break;
      a0 *= 0.5;
    }
    double alpha = a0;
    if (std::isfinite(slope_a0) && slope_a0 != slope0) {
      const double secant = a0 * slope0 / (slope0 - slope_a0);
      if (std::isfinite(secant) && secant > 0.0) alpha = std::min(secant, 1e6 * a0);
    }

    // Roundoff allowance keeps the search from failing at the float floor.
    // Once energy differences shrink below measurement, the final stage
    // falls back to a slope window (Hager-Zhang approximate Wolfe) so that
    // progress invisible to the energy is still accepted.
    const double slack = 1e-16 * (1.0 + std::fabs(current));
    const double wolfe_window = 1e-14 * (1.0 + std::fabs(current));
    double next = 0.0;
    bool accepted = false;
    for (int halve = 0; halve < 60; ++halve) {
      for (std::size_t k = 0; k < n; ++k) trial.v[k] = u.v[k] + alpha * direction[k];
      next = energy(p, trial);
      if (std::isfinite(next) && next <= current + armijo * alpha * slope0 + slack) {
        accepted = true;
        break;
      }
      if (final_stage && std::isfinite(next) && std::fabs(next - current) <= wolfe_window) {
        effective_gradient(p, trial, energy_gradient(p, trial), scratch);
        const double slope_t = dot(scratch.v, direction);
        if (slope_t >= 0.9 * slope0 && slope_t <= -0.8 * slope0) {
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // Retry once along the preconditioned gradient before concluding the
      // iterate is numerically stationary in every available direction.
      if (!steepest) {
        direction = precond;
        steepest = true;
        continue;
      }
      break;
    }

    u.v.swap(trial.v);
    ++iter;
    const double drop = std::fabs(current - next);
    current = next;

    Field next_grad(u.grid);
    const double prev_gnorm = gnorm;
    gnorm = effective_gradient(p, u, energy_gradient(p, u), next_grad);
    if (!final_stage) {
      // Warm-start stages quit once the energy stagnates; the streak is long
      // enough to ride out conjugate-gradient plateaus.
      if (drop <= opts.energy_tol * (1.0 + std::fabs(current))) {
        if (++stall >= 50) break;
      } else {
        stall = 0;
      }
    } else {
      // Safety valve: identical energy and stationarity over a long run
      // means the iteration is reproducing the same state.
      if (drop <= slack && std::fabs(gnorm - prev_gnorm) <= 1e-12 * gnorm) {
        if (++stall >= 100) break;
      } else {
        stall = 0;
      }
    }

    double beta_num = 0.0;
    double rz_next = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double rn = -next_grad.v[k];
      const double zn = rn / diag[k];
      beta_num += zn * (rn - residual[k]);
      rz_next += zn * rn;
      residual[k] = rn;
      precond[k] = zn;
    }
    const double beta = rz > 0.0 ? std::max(0.0, beta_num / rz) : 0.0;
    for (std::size_t k = 0; k < n; ++k) direction[k] = precond[k] + beta * direction[k];
    steepest = beta == 0.0;
    if (!(dot(next_grad.v, direction) < 0.0)) {
      direction = precond;
      steepest = true;
    }
    rz = rz_next;
    grad = std::move(next_grad);
    step_seed = std::clamp(2.0 * alpha, 1e-16, 1e16);
  }
  return {iter, current, gnorm, gnorm <= grad_tol};
}

// A cell whose average is pressed against the indicator wall (just below
// zero, so chi contributes nothing but blocks upward moves) can hide
// first-order descent along the wall facet: every one-sided coordinate probe
// crosses the wall and reads its barrier, not the smooth imbalance tangent
// to it. Sliding the free corners of a pressed cell along the projected
// negative gradient keeps the cell average fixed, so the move stays on the
// facet; acceptance backtracks on the true energy, which prices any wall
// crossings of the neighboring cells. Returns true when a slide improved.
bool wall_slide(const Problem& p, Field& u, const std::vector<double>& diag) {
  if (p.lambda_plus <= 0.0) return false;
  const Grid& g = u.grid;
  const double band = 1e-5 * p.scale;
  const double armijo = 1e-4;
  double current = energy(p, u);
  bool any = false;
  for (int sweep = 0; sweep < 12; ++sweep) {
    bool improved = false;
    const Field grad = energy_gradient(p, u);
    for (int cj = 0; cj < g.cell_ny(); ++cj) {
      for (int ci = 0; ci < g.cell_nx(); ++ci) {
        const double mean = cell_average(u, ci, cj);
        if (!(mean > -band && mean <= 0.0)) continue;
        const int corner_count = g.dim() == 2 ? 4 : 2;
        int idx[4];
        int k = 0;
        for (int c = 0; c < corner_count; ++c) {
          const int i = ci + (c & 1);
          const int j = g.dim() == 2 ? cj + (c >> 1) : 0;
          if (!g.boundary_node(i, j)) idx[k++] = g.index(i, j);
        }
        if (k < 2) continue;
        double mean_g = 0.0;
        for (int c = 0; c < k; ++c) mean_g += grad.v[static_cast<std::size_t>(idx[c])];
        mean_g /= k;
        double dir[4];
        double slope = 0.0;
        double curv = 0.0;
        for (int c = 0; c < k; ++c) {
          dir[c] = mean_g - grad.v[static_cast<std::size_t>(idx[c])];
          slope -= dir[c] * dir[c];
          curv += diag[static_cast<std::size_t>(idx[c])] * dir[c] * dir[c];
        }
        double old[4];
        for (int c = 0; c < k; ++c) old[c] = u.v[static_cast<std::size_t>(idx[c])];
        if (slope < -1e-30 * (1.0 + std::fabs(current))) {
          double t = std::min(curv > 0.0 ? -slope / curv : p.scale, 1e3 * p.scale);
          for (int halve = 0; halve < 40; ++halve, t *= 0.5) {
            for (int c = 0; c < k; ++c)
              u.v[static_cast<std::size_t>(idx[c])] = old[c] + t * dir[c];
            const double trial = energy(p, u);
            if (trial <= current + armijo * t * slope) {
              current = trial;
              improved = true;
              any = true;
              break;
            }
            for (int c = 0; c < k; ++c) u.v[static_cast<std::size_t>(idx[c])] = old[c];
          }
        }
        // Press the cell average the rest of the way to the wall: the probe
        // window keeps the descent a probe-width short of it, which leaves
        // pressure times slack on the table.
        const double target = -1e-4 * band;
        double shift = (target - cell_average(u, ci, cj)) *
                       static_cast<double>(corner_count) / static_cast<double>(k);
        if (shift > 0.0) {
          for (int c = 0; c < k; ++c) old[c] = u.v[static_cast<std::size_t>(idx[c])];
          for (int halve = 0; halve < 20; ++halve, shift *= 0.5) {
            for (int c = 0; c < k; ++c)
              u.v[static_cast<std::size_t>(idx[c])] = old[c] + shift;
            const double trial = energy(p, u);
            if (trial < current) {
              current = trial;
              improved = true;
              any = true;
              break;
            }
            for (int c = 0; c < k; ++c) u.v[static_cast<std::size_t>(idx[c])] = old[c];
          }
        }
      }
    }
    if (!improved) break;
  }
  return any;
}

// The final stage alternates full descents with wall slides until neither
// moves: the slide exposes descent the coordinate probes cannot see, and the
// re-descent re-equilibrates the smooth nodes afterwards.
StageResult final_polish(const Problem& stage, Field& u, StageResult last,
                         const SolveOptions& opts, const std::vector<double>& diag) {
  for (int round = 0; round < 6; ++round) {
    if (!wall_slide(stage, u, diag)) break;
    last = descend(stage, u, opts, diag, true);
  }
  return last;
}

struct RunResult {
  Field field;
  double energy = 0.0;
  std::vector<StageTrace> stages;
  bool converged = false;
};

RunResult run_schedule(const Problem& p, Field u, const SolveOptions& opts,
                       const std::vector<double>& eps_sched,
                       const std::vector<double>& mu_sched,
                       const std::vector<double>& diag) {
  RunResult out;
  Problem stage = p;
  StageResult last;
  for (std::size_t ei = 0; ei < eps_sched.size(); ++ei) {
    for (std::size_t mi = 0; mi < mu_sched.size(); ++mi) {
      const bool final_stage = ei + 1 == eps_sched.size() && mi + 1 == mu_sched.size();
      stage.eps_chi = eps_sched[ei];
      stage.mu_reg = mu_sched[mi];
      last = descend(stage, u, opts, diag, final_stage);
      if (final_stage) last = final_polish(stage, u, last, opts, diag);
      out.stages.push_back(
          {eps_sched[ei], mu_sched[mi], last.iterations, last.energy, last.grad_norm});
    }
  }
  out.field = std::move(u);
  out.energy = last.energy;
  out.converged = last.grad_converged;
  return out;
}

// With a positive activation weight the positivity front can freeze a cell
// or two away from its best nodal placement: relocating the front is a
// coordinated multi-node move whose energy barrier scales with lambda_+ h,
// which no line-searched descent direction crosses. Shifting the whole field
// by one cell re-seats the front in a single move; re-descending the shifted
// field at the sharpest smoothing settles the interior, and the hop is kept
// only when it strictly lowers the energy.
void shift_polish(const Problem& p, RunResult& run, const SolveOptions& opts,
                  double eps_final, double mu_final,
                  const std::vector<double>& diag) {
  if (p.lambda_plus <= 0.0) return;
  const Grid& g = p.grid;
  Problem stage = p;
  stage.eps_chi = eps_final;
  stage.mu_reg = mu_final;
  std::vector<std::pair<int, int>> dirs = {{1, 0}, {-1, 0}};
  if (g.dim() == 2) {
    dirs.push_back({0, 1});
    dirs.push_back({0, -1});
  }
  for (int hop = 0; hop < 20; ++hop) {
    bool improved = false;
    for (const auto& [di, dj] : dirs) {
      Field cand = run.field;
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          if (g.boundary_node(i, j)) {
            cand.at(i, j) = p.dirichlet.at(i, j);
            continue;
          }
          const int si = std::clamp(i - di, 0, g.nx - 1);
          const int sj = std::clamp(j - dj, 0, g.ny - 1);
          cand.at(i, j) = run.field.at(si, sj);
        }
      StageResult res = descend(stage, cand, opts, diag, true);
      res = final_polish(stage, cand, res, opts, diag);
      if (res.energy < run.energy - 1e-14 * (1.0 + std::fabs(run.energy))) {
        run.field = std::move(cand);
        run.energy = res.energy;
        run.converged = res.grad_converged;
        run.stages.push_back(
            {eps_final, mu_final, res.iterations, res.energy, res.grad_norm});
        improved = true;
      }
    }
    if (!improved) return;
  }
}

bool wants_multistart(const Problem& p, const SolveOptions& opts) {
  if (opts.multistart == 0) return false;
  if (opts.multistart > 0) return true;
  if (p.lambda_plus > 0.0) return true;
  return p.absorption && p.absorption->theta0() < 0.0;
}

// Growth-only companion problem used for G-harmonic solves.
Problem growth_only_problem(const OrliczFunction& growth, const Grid& grid,
                            const Field& data) {
  Problem q;
  q.grid = grid;
  // Non-owning handle; every G-harmonic solve completes within the caller's
  // lifetime of `growth`.
  q.growth = std::shared_ptr<const OrliczFunction>(&growth, [](const OrliczFunction*) {});
  q.lambda_plus = 0.0;
  q.dirichlet = data;
  q.set_constant_coefficients(0.0, 0.0);
  return q;
}

Field g_harmonic_core(const OrliczFunction& growth, const Grid& grid, Field start,
                      const SolveOptions& opts) {
  const Problem q = growth_only_problem(growth, grid, start);
  const auto mu_sched = resolved_mu_schedule(q, opts);
  const auto diag = quadratic_diagonal(grid);
  Problem stage = q;
  stage.eps_chi = 1.0;  // indicator absent, value irrelevant
  for (std::size_t mi = 0; mi < mu_sched.size(); ++mi) {
    stage.mu_reg = mu_sched[mi];
    descend(stage, start, opts, diag, mi + 1 == mu_sched.size());
  }
  return start;
}

}  // namespace

std::vector<double> resolved_eps_schedule(const Problem& p, const SolveOptions& o) {
  if (!o.eps_schedule.empty()) return o.eps_schedule;
  if (p.lambda_plus == 0.0) return {1e-6 * p.scale};
  return {1e-1 * p.scale, 1e-2 * p.scale, 1e-3 * p.scale,
          1e-4 * p.scale, 1e-5 * p.scale, 1e-6 * p.scale};
}

std::vector<double> resolved_mu_schedule(const Problem& p, const SolveOptions& o) {
  if (!o.mu_schedule.empty()) return o.mu_schedule;
  return {1e-2 * p.scale, 1e-3 * p.scale, 1e-4 * p.scale,
          1e-5 * p.scale, 1e-6 * p.scale, 0.0};
}

Solution minimize(const Problem& p, const SolveOptions& opts) {
  const auto eps_sched = resolved_eps_schedule(p, opts);
  const auto mu_sched = resolved_mu_schedule(p, opts);
  if (eps_sched.empty() || mu_sched.empty())
    throw std::invalid_argument("minimize: empty continuation schedule");
  const auto diag = quadratic_diagonal(p.grid);

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < p.grid.ny; ++j)
    for (int i = 0; i < p.grid.nx; ++i)
      if (p.grid.boundary_node(i, j)) {
        lo = std::min(lo, p.dirichlet.at(i, j));
        hi = std::max(hi, p.dirichlet.at(i, j));
      }

  std::vector<Field> starts;
  Field gh = g_harmonic_extension(*p.growth, p.grid, p.dirichlet, opts);
  for (double& v : gh.v) v = std::clamp(v, lo, hi);
  starts.push_back(std::move(gh));
  if (wants_multistart(p, opts)) {
    Field zero_inside = p.dirichlet;
    Field flat_top = p.dirichlet;
    for (int j = 0; j < p.grid.ny; ++j)
      for (int i = 0; i < p.grid.nx; ++i)
        if (!p.grid.boundary_node(i, j)) {
          zero_inside.at(i, j) = 0.0;
          flat_top.at(i, j) = hi;
        }
    starts.push_back(std::move(zero_inside));
    starts.push_back(std::move(flat_top));
  }

  RunResult best;
  bool have = false;
  for (Field& start : starts) {
    RunResult run = run_schedule(p, std::move(start), opts, eps_sched, mu_sched, diag);
    if (!have || run.energy < best.energy) {
      best = std::move(run);
      have = true;
    }
  }
  shift_polish(p, best, opts, eps_sched.back(), mu_sched.back(), diag);

  Solution out;
  out.field = std::move(best.field);
  out.energy = best.energy;
  out.stages = std::move(best.stages);
  out.converged = best.converged;
  return out;
}

Field g_harmonic_extension(const OrliczFunction& growth, const Grid& grid,
                           const Field& boundary, const SolveOptions& opts) {
  if (boundary.grid != grid)
    throw std::invalid_argument("g_harmonic_extension: boundary field grid mismatch");
  if (grid.dim() == 1) {
    // The affine interpolant has constant cell gradient, which minimizes
    // sum h G(|u'|) for any convex G with the endpoints fixed.
    Field u(grid);
    const double a = boundary.v.front();
    const double b = boundary.v.back();
    for (int i = 0; i < grid.nx; ++i)
      u.at(i, 0) = a + (b - a) * static_cast<double>(i) / (grid.nx - 1);
    return u;
  }
  // Transfinite blend of the boundary rows/columns as the starting guess.
  Field u(grid);
  const int nx = grid.nx, ny = grid.ny;
  for (int j = 0; j < ny; ++j) {
    const double t = static_cast<double>(j) / (ny - 1);
    for (int i = 0; i < nx; ++i) {
      const double s = static_cast<double>(i) / (nx - 1);
      if (grid.boundary_node(i, j)) {
        u.at(i, j) = boundary.at(i, j);
        continue;
      }
      const double edges = (1.0 - s) * boundary.at(0, j) + s * boundary.at(nx - 1, j) +
                           (1.0 - t) * boundary.at(i, 0) + t * boundary.at(i, ny - 1);
      const double corners =
          (1.0 - s) * (1.0 - t) * boundary.at(0, 0) + s * (1.0 - t) * boundary.at(nx - 1, 0) +
          (1.0 - s) * t * boundary.at(0, ny - 1) + s * t * boundary.at(nx - 1, ny - 1);
      u.at(i, j) = edges - corners;
    }
  }
  return g_harmonic_core(growth, grid, std::move(u), opts);
}

Field solve_g_harmonic(const OrliczFunction& growth, const Field& trace_source,
                       NodeBox box, const SolveOptions& opts) {
  const Grid& g = trace_source.grid;
  const bool two_d = g.dim() == 2;
  if (!two_d) box.j0 = box.j1 = 0;
  if (box.i0 < 0 || box.i1 >= g.nx || box.i1 - box.i0 < 2 ||
      (two_d && (box.j0 < 0 || box.j1 >= g.ny || box.j1 - box.j0 < 2)))
    throw std::invalid_argument("solve_g_harmonic: box needs >= 3 nodes per axis inside the grid");

  Grid sub = two_d ? Grid::make_2d(g.x(box.i0), g.x(box.i1), g.y(box.j0), g.y(box.j1),
                                   box.i1 - box.i0 + 1, box.j1 - box.j0 + 1)
                   : Grid::make_1d(g.x(box.i0), g.x(box.i1), box.i1 - box.i0 + 1);
  Field window(sub);
  for (int j = box.j0; j <= box.j1; ++j)
    for (int i = box.i0; i <= box.i1; ++i)
      window.at(i - box.i0, j - box.j0) = trace_source.at(i, j);

  if (!two_d) {
    Field affine = g_harmonic_extension(growth, sub, window, opts);
    return affine;
  }
  // The copied window doubles as trace data and warm start.
  return g_harmonic_core(growth, sub, std::move(window), opts);
}

std::pair<double, Field> el_residual(const Problem& p, const Field& u, double threshold) {
  Problem raw = p;
  raw.mu_reg = 0.0;
  raw.lambda_plus = 0.0;
  Field grad = energy_gradient(raw, u);

  const Grid& g = u.grid;
  const bool two_d = g.dim() == 2;
  auto above = [&](int i, int j) { return u.at(i, j) > threshold; };
  auto cell_above = [&](int ci, int cj) {
    if (!two_d) return above(ci, 0) && above(ci + 1, 0);
    return above(ci, cj) && above(ci + 1, cj) && above(ci, cj + 1) && above(ci + 1, cj + 1);
  };

  Field out(g);
  double worst = 0.0;
  bool any = false;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.boundary_node(i, j)) continue;
      bool keep = true;
      if (!two_d) {
        keep = cell_above(i - 1, 0) && cell_above(i, 0);
      } else {
        for (int cj = j - 1; cj <= j && keep; ++cj)
          for (int ci = i - 1; ci <= i && keep; ++ci) keep = cell_above(ci, cj);
      }
      if (!keep) continue;
      any = true;
      out.at(i, j) = grad.at(i, j);
      worst = std::max(worst, std::fabs(grad.at(i, j)));
    }
  }
  if (!any)
    throw std::runtime_error(
        "el_residual: no interior node with all incident cells above the threshold");
  return {worst, std::move(out)};
}

Solution brute_force_minimize(const Problem& p, const std::vector<double>& levels) {
  if (levels.empty() || levels.size() > 12)
    throw std::invalid_argument("brute_force_minimize: need 1..12 levels");
  const Grid& g = p.grid;
  std::vector<int> free_nodes;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (!g.boundary_node(i, j)) free_nodes.push_back(g.index(i, j));
  if (free_nodes.empty() || free_nodes.size() > 8)
    throw std::invalid_argument("brute_force_minimize: need 1..8 interior nodes");
  const double states = std::pow(static_cast<double>(levels.size()),
                                 static_cast<double>(free_nodes.size()));
  if (states > 1e8)
    throw std::invalid_argument("brute_force_minimize: state count exceeds 1e8");

  SolveOptions defaults;
  Problem final_p = p;
  final_p.eps_chi = resolved_eps_schedule(p, defaults).back();
  final_p.mu_reg = resolved_mu_schedule(p, defaults).back();

  Field u = p.dirichlet;
  for (int idx : free_nodes) u.v[static_cast<std::size_t>(idx)] = levels[0];
  std::vector<std::size_t> odometer(free_nodes.size(), 0);

  double best_energy = std::numeric_limits<double>::infinity();
  Field best = u;
  while (true) {
    const double e = energy(final_p, u);
    if (e < best_energy) {
      best_energy = e;
      best = u;
    }
    std::size_t pos = 0;
    while (pos < odometer.size()) {
      if (++odometer[pos] < levels.size()) break;
      odometer[pos] = 0;
      ++pos;
    }
    if (pos == odometer.size()) break;
    for (std::size_t k = 0; k <= pos; ++k)
      u.v[static_cast<std::size_t>(free_nodes[k])] = levels[odometer[k]];
  }

  Solution out;
  out.field = std::move(best);
  out.energy = best_energy;
  out.stages.push_back({final_p.eps_chi, final_p.mu_reg, 0, best_energy,
                        max_abs(energy_gradient(final_p, out.field).v)});
  out.converged = true;
  return out;
}

}  // namespace fbl
