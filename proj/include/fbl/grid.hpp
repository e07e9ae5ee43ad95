// Tensor grids on intervals and rectangles with nodal scalar fields.
// Node index is i + j*nx (x fastest); cells are the nx-1 (x ny-1) boxes
// between adjacent nodes.
#pragma once

#include <vector>

namespace fbl {

struct Domain {
  int dim = 1;
  double x_lo = 0.0, x_hi = 1.0;
  double y_lo = 0.0, y_hi = 1.0;

  bool operator==(const Domain& other) const = default;
};

struct Grid {
  Domain domain;
  int nx = 2;
  int ny = 1;  // 1 for 1D
  double hx = 0.0;
  double hy = 0.0;

  static Grid make_1d(double x_lo, double x_hi, int n);
  static Grid make_2d(double x_lo, double x_hi, double y_lo, double y_hi, int nx, int ny);

  int dim() const { return domain.dim; }
  int node_count() const { return nx * ny; }
  int cell_nx() const { return nx - 1; }
  int cell_ny() const { return domain.dim == 2 ? ny - 1 : 1; }
  int cell_count() const { return cell_nx() * cell_ny(); }
  double cell_volume() const { return domain.dim == 2 ? hx * hy : hx; }

  double x(int i) const { return domain.x_lo + i * hx; }
  double y(int j) const { return domain.dim == 2 ? domain.y_lo + j * hy : 0.0; }
  int index(int i, int j) const { return i + j * nx; }

  bool boundary_node(int i, int j) const {
    if (i == 0 || i == nx - 1) return true;
    return domain.dim == 2 && (j == 0 || j == ny - 1);
  }

  bool operator==(const Grid& other) const = default;
};

struct Field {
  Grid grid;
  std::vector<double> v;

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0) : grid(g), v(g.node_count(), fill) {}

  double& at(int i, int j) { return v[grid.index(i, j)]; }
  double at(int i, int j) const { return v[grid.index(i, j)]; }
};

}  // namespace fbl
