// Discrete form of the functional
//   J(u) = sum_cells |cell| [ G(|grad u|) + q F(u+) + h u + lambda_+ chi(u) ]
// with one-point (cell-center) quadrature, linear/bilinear cell gradients,
// the regularized magnitude sqrt(|grad u|^2 + mu^2) - mu, and the smoothed
// indicator chi_eps(t) = clamp(t/eps, 0, 1) for t > 0.
#pragma once

#include <memory>
#include <vector>

#include "fbl/grid.hpp"
#include "fbl/orlicz.hpp"

namespace fbl {

struct Problem {
  Grid grid;
  std::shared_ptr<const OrliczFunction> growth;       // G
  std::shared_ptr<const Nonlinearity> absorption;     // F, may be null
  std::vector<double> q_cell;                         // per-cell coefficient values
  std::vector<double> h_cell;
  double lambda_plus = 0.0;
  Field dirichlet;        // full-size field; boundary entries are the data
  double eps_chi = 1e-6;  // current indicator smoothing width
  double mu_reg = 0.0;    // current gradient regularization
  double scale = 1.0;     // max |dirichlet| over boundary nodes, >= fallback 1

  // Builds q_cell/h_cell from constants, recomputes scale; grid and growth
  // must be set first.
  void set_constant_coefficients(double q, double h);
  void refresh_scale();
};

double chi_smoothed(double t, double eps);

// Cell-center gradient components of u on cell (ci, cj).
void cell_gradient(const Field& u, int ci, int cj, double* gx, double* gy);
// Mean of the cell's corner values (the one-point quadrature value of u).
double cell_average(const Field& u, int ci, int cj);

// Energy contribution |cell| * [G(|grad u|) + q F(ubar+) + h ubar + lambda chi]
// of a single cell. No shape checks.
double cell_energy(const Problem& p, const Field& u, int ci, int cj);

// Total energy. Summation is a fixed-order reduction, so results are
// bit-reproducible. Throws on shape mismatch or non-finite contributions
// (the message names the cell).
double energy(const Problem& p, const Field& u);

// Exact gradient of energy() with respect to interior nodal values;
// boundary entries are zero. For singular f (theta0 < 0) the evaluation
// floor t >= 1e-12*scale applies inside f only.
Field energy_gradient(const Problem& p, const Field& u);

struct TruncationLevel {
  double level = 0.0;
  double measure = 0.0;   // volume of cells whose center value exceeds the level
  double integral = 0.0;  // one-point quadrature of ((|u|-k)+)^e
};

std::vector<TruncationLevel> truncation_profile(const Field& u,
                                                const std::vector<double>& levels,
                                                double exponent);

}  // namespace fbl
