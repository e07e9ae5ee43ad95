#include "fbl/grid.hpp"

#include <stdexcept>

namespace fbl {

Grid Grid::make_1d(double x_lo, double x_hi, int n) {
  if (!(x_hi > x_lo)) throw std::invalid_argument("Grid: empty interval");
  if (n < 3) throw std::invalid_argument("Grid: need at least 3 nodes per axis");
  Grid g;
  g.domain = {1, x_lo, x_hi, 0.0, 0.0};
  g.nx = n;
  g.ny = 1;
  g.hx = (x_hi - x_lo) / (n - 1);
  g.hy = 0.0;
  return g;
}

Grid Grid::make_2d(double x_lo, double x_hi, double y_lo, double y_hi, int nx, int ny) {
  if (!(x_hi > x_lo) || !(y_hi > y_lo)) throw std::invalid_argument("Grid: empty rectangle");
  if (nx < 3 || ny < 3) throw std::invalid_argument("Grid: need at least 3 nodes per axis");
  Grid g;
  g.domain = {2, x_lo, x_hi, y_lo, y_hi};
  g.nx = nx;
  g.ny = ny;
  g.hx = (x_hi - x_lo) / (nx - 1);
  g.hy = (y_hi - y_lo) / (ny - 1);
  return g;
}

}  // namespace fbl
