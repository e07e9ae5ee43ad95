#include "fbl/problem.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fbl {

void Problem::set_constant_coefficients(double q, double h) {
  q_cell.assign(grid.cell_count(), q);
  h_cell.assign(grid.cell_count(), h);
  refresh_scale();
}

void Problem::refresh_scale() {
  double m = 0.0;
  // A not-yet-assigned dirichlet field counts as zero data.
  if (dirichlet.v.size() == static_cast<std::size_t>(grid.node_count())) {
    for (int j = 0; j < grid.ny; ++j) {
      for (int i = 0; i < grid.nx; ++i) {
        if (grid.boundary_node(i, j)) m = std::max(m, std::fabs(dirichlet.at(i, j)));
      }
    }
  }
  scale = m > 0.0 ? m : 1.0;
}

double chi_smoothed(double t, double eps) {
  if (t <= 0.0) return 0.0;
  return t >= eps ? 1.0 : t / eps;
}

void cell_gradient(const Field& u, int ci, int cj, double* gx, double* gy) {
  const Grid& g = u.grid;
  if (g.dim() == 1) {
    *gx = (u.at(ci + 1, 0) - u.at(ci, 0)) / g.hx;
    *gy = 0.0;
    return;
  }
  const double sw = u.at(ci, cj), se = u.at(ci + 1, cj);
  const double nw = u.at(ci, cj + 1), ne = u.at(ci + 1, cj + 1);
  *gx = ((se + ne) - (sw + nw)) / (2.0 * g.hx);
  *gy = ((nw + ne) - (sw + se)) / (2.0 * g.hy);
}

double cell_average(const Field& u, int ci, int cj) {
  const Grid& g = u.grid;
  if (g.dim() == 1) return 0.5 * (u.at(ci, 0) + u.at(ci + 1, 0));
  return 0.25 * (u.at(ci, cj) + u.at(ci + 1, cj) + u.at(ci, cj + 1) + u.at(ci + 1, cj + 1));
}

namespace {

void check_shapes(const Problem& p, const Field& u) {
  if (!(u.grid == p.grid) || static_cast<int>(u.v.size()) != p.grid.node_count()) {
    throw std::invalid_argument("energy: field does not match the problem grid");
  }
  if (static_cast<int>(p.q_cell.size()) != p.grid.cell_count() ||
      static_cast<int>(p.h_cell.size()) != p.grid.cell_count()) {
    throw std::invalid_argument("energy: coefficient arrays do not match the cell count");
  }
}

double regularized_magnitude(double gx, double gy, double mu) {
  const double m2 = gx * gx + gy * gy;
  if (mu == 0.0) return std::sqrt(m2);
  return std::sqrt(m2 + mu * mu) - mu;
}

}  // namespace

double cell_energy(const Problem& p, const Field& u, int ci, int cj) {
  double gx, gy;
  cell_gradient(u, ci, cj, &gx, &gy);
  const double r = regularized_magnitude(gx, gy, p.mu_reg);
  const double ubar = cell_average(u, ci, cj);
  const int c = ci + cj * p.grid.cell_nx();
  double cell = p.growth->G(r) + p.h_cell[c] * ubar;
  if (p.absorption) cell += p.q_cell[c] * p.absorption->F(std::max(ubar, 0.0));
  if (p.lambda_plus != 0.0) cell += p.lambda_plus * chi_smoothed(ubar, p.eps_chi);
  return p.grid.cell_volume() * cell;
}

double energy(const Problem& p, const Field& u) {
  check_shapes(p, u);
  const Grid& g = p.grid;
  double total = 0.0;
  for (int cj = 0; cj < g.cell_ny(); ++cj) {
    for (int ci = 0; ci < g.cell_nx(); ++ci) {
      const double cell = cell_energy(p, u, ci, cj);
      if (!std::isfinite(cell)) {
        throw std::runtime_error("energy: non-finite contribution at cell " +
                                 std::to_string(ci + cj * g.cell_nx()));
      }
      total += cell;
    }
  }
  return total;
}

Field energy_gradient(const Problem& p, const Field& u) {
  check_shapes(p, u);
  const Grid& g = p.grid;
  const double w = g.cell_volume();
  const bool has_F = p.absorption != nullptr;
  const bool singular_f = has_F && p.absorption->theta0() < 0.0;
  const double f_floor = 1e-12 * p.scale;
  const double corner_weight = g.dim() == 1 ? 0.5 : 0.25;
  Field grad(g, 0.0);

  for (int cj = 0; cj < g.cell_ny(); ++cj) {
    for (int ci = 0; ci < g.cell_nx(); ++ci) {
      double gx, gy;
      cell_gradient(u, ci, cj, &gx, &gy);
      const double m2 = gx * gx + gy * gy;
      const double root = std::sqrt(m2 + p.mu_reg * p.mu_reg);
      const double r = p.mu_reg == 0.0 ? std::sqrt(m2) : root - p.mu_reg;
      // d/d∇u of G(r(|∇u|)) = g(r)/root * ∇u; at ∇u = 0 the correct limit is 0
      // because G'(0) = g(0) = 0.
      const double a = root > 0.0 ? p.growth->g(r) / root : 0.0;
      const double ubar = cell_average(u, ci, cj);
      const int c = ci + cj * g.cell_nx();

      double dubar = p.h_cell[c];
      if (has_F && ubar > 0.0) {
        const double arg = singular_f ? std::max(ubar, f_floor) : ubar;
        dubar += p.q_cell[c] * p.absorption->f(arg);
      }
      if (p.lambda_plus != 0.0 && ubar > 0.0 && ubar < p.eps_chi) {
        dubar += p.lambda_plus / p.eps_chi;
      }
      if (!std::isfinite(dubar) || !std::isfinite(a)) {
        throw std::runtime_error("energy_gradient: non-finite contribution at cell " +
                                 std::to_string(c));
      }

      if (g.dim() == 1) {
        const double gflux = w * a * gx / g.hx;
        const double davg = w * dubar * corner_weight;
        grad.at(ci, 0) += -gflux + davg;
        grad.at(ci + 1, 0) += gflux + davg;
      } else {
        const double fx = w * a * gx / (2.0 * g.hx);
        const double fy = w * a * gy / (2.0 * g.hy);
        const double davg = w * dubar * corner_weight;
        grad.at(ci, cj) += -fx - fy + davg;          // SW
        grad.at(ci + 1, cj) += fx - fy + davg;       // SE
        grad.at(ci, cj + 1) += -fx + fy + davg;      // NW
        grad.at(ci + 1, cj + 1) += fx + fy + davg;   // NE
      }
    }
  }

  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (g.boundary_node(i, j)) grad.at(i, j) = 0.0;
    }
  }
  return grad;
}

std::vector<TruncationLevel> truncation_profile(const Field& u,
                                                const std::vector<double>& levels,
                                                double exponent) {
  for (double v : u.v) {
    if (!std::isfinite(v)) throw std::invalid_argument("truncation_profile: non-finite field");
  }
  const Grid& g = u.grid;
  const double w = g.cell_volume();
  std::vector<TruncationLevel> out;
  out.reserve(levels.size());
  for (double k : levels) {
    TruncationLevel row;
    row.level = k;
    for (int cj = 0; cj < g.cell_ny(); ++cj) {
      for (int ci = 0; ci < g.cell_nx(); ++ci) {
        const double c = std::fabs(cell_average(u, ci, cj));
        if (c > k) {
          row.measure += w;
          row.integral += w * std::pow(c - k, exponent);
        }
      }
    }
    out.push_back(row);
  }
  return out;
}

}  // namespace fbl
