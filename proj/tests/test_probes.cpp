#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fbl/orlicz.hpp"
#include "fbl/probes.hpp"
#include "fbl/problem.hpp"

using fbl::Field;
using fbl::Grid;
using fbl::Rect;
using fbl::parse_orlicz;

namespace {

Field sampled_1d(int n, double (*f)(double)) {
  Grid g = Grid::make_1d(0.0, 1.0, n);
  Field u(g);
  for (int i = 0; i < n; ++i) u.at(i, 0) = f(g.x(i));
  return u;
}

Field random_field(const Grid& g, std::uint64_t seed) {
  Field u(g);
  std::mt19937_64 rng(seed);
  for (double& v : u.v) v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return u;
}

}  // namespace

TEST_CASE("free boundary crossings are located by edge interpolation") {
  Grid g = Grid::make_1d(0.0, 1.0, 5);
  Field u(g);
  u.v = {0.0, 0.0, 0.1, 0.3, 0.5};
  const auto pts = fbl::extract_free_boundary(u, 0.05);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].x == doctest::Approx(0.375).epsilon(1e-12));
  CHECK(pts[0].y == 0.0);

  Grid g2 = Grid::make_2d(0.0, 1.0, 0.0, 1.0, 5, 5);
  Field w(g2);
  for (int j = 0; j < 5; ++j)
    for (int i = 0; i < 5; ++i) w.at(i, j) = g2.x(i) - 0.5;
  const auto pts2 = fbl::extract_free_boundary(w, 0.1);
  REQUIRE(pts2.size() == 5);
  for (const auto& pt : pts2) CHECK(pt.x == doctest::Approx(0.6).epsilon(1e-12));

  Field flat(g, 0.2);
  CHECK(fbl::extract_free_boundary(flat, 0.5).empty());
}

TEST_CASE("dyadic sup evaluates the interpolant exactly on linear data") {
  const Field u = sampled_1d(1025, [](double x) { return x; });
  const fbl::GrowthFit fit = fbl::dyadic_sup(u, 0.5, 0.0, 0.25, 4);
  REQUIRE(fit.radii.size() == 5);
  for (int j = 0; j <= 4; ++j) {
    const double r = std::ldexp(0.25, -j);
    CHECK(fit.radii[static_cast<std::size_t>(j)] == doctest::Approx(r).epsilon(1e-15));
    CHECK(fit.sup_values[static_cast<std::size_t>(j)] ==
          doctest::Approx(0.5 + r).epsilon(1e-13));
  }
  const fbl::GrowthFit grad =
      fbl::dyadic_sup(u, 0.5, 0.0, 0.25, 4, fbl::GrowthTarget::gradient);
  for (double s : grad.sup_values) CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("dyadic sup is nonincreasing across levels") {
  const Field u = random_field(Grid::make_1d(0.0, 1.0, 129), 5);
  const fbl::GrowthFit fit = fbl::dyadic_sup(u, 0.41, 0.0, 0.3, 4);
  for (std::size_t j = 1; j < fit.sup_values.size(); ++j)
    CHECK(fit.sup_values[j] <= fit.sup_values[j - 1] + 1e-15);

  // In 2D the circle sampling keeps monotonicity once radii clear a few cells.
  const Field w = random_field(Grid::make_2d(0.0, 1.0, 0.0, 1.0, 65, 65), 6);
  const fbl::GrowthFit fit2 = fbl::dyadic_sup(w, 0.5, 0.5, 0.4, 3);
  CHECK(fit2.sup_values[1] <= fit2.sup_values[0] + 1e-15);
  CHECK(fit2.sup_values[2] <= fit2.sup_values[1] + 1e-15);
}

TEST_CASE("dyadic sup rejects malformed queries") {
  const Field u = sampled_1d(1025, [](double x) { return x; });
  CHECK_THROWS_AS((void)fbl::dyadic_sup(u, 1.5, 0.0, 0.25, 2), std::invalid_argument);
  CHECK_THROWS_AS((void)fbl::dyadic_sup(u, 0.5, 0.0, -0.1, 2), std::invalid_argument);
  CHECK_THROWS_AS((void)fbl::dyadic_sup(u, 0.5, 0.0, 0.25, -1), std::invalid_argument);
  CHECK_THROWS_AS((void)fbl::dyadic_sup(u, 0.5, 0.0, 0.25, 12), std::invalid_argument);
}

TEST_CASE("growth fits recover power profiles once radii span 256 cells") {
  for (const double beta : {0.5, 1.0, 1.5, 2.0, 3.0}) {
    CAPTURE(beta);
    Grid g = Grid::make_1d(0.0, 1.0, 1025);
    Field u(g);
    for (int i = 0; i < g.nx; ++i) u.at(i, 0) = std::pow(std::fabs(g.x(i) - 0.5), beta);
    fbl::GrowthFit fit = fbl::dyadic_sup(u, 0.5, 0.0, 0.25, 7);
    fit = fbl::fit_growth_exponent(fit, 0.0);
    CHECK(std::fabs(fit.fitted_exponent - beta) < 0.02);
    CHECK(fit.r_squared > 0.999);
  }
}

TEST_CASE("growth fit window honors the value floor") {
  const Field u = sampled_1d(1025, [](double x) { return std::fabs(x - 0.5); });
  fbl::GrowthFit base = fbl::dyadic_sup(u, 0.5, 0.0, 0.25, 6);
  fbl::GrowthFit fit = fbl::fit_growth_exponent(base, 0.02);
  CHECK(fit.window_lo == 0);
  CHECK(fit.window_hi == 3);
  CHECK(fit.fitted_exponent == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS((void)fbl::fit_growth_exponent(base, 0.2), std::runtime_error);
}

TEST_CASE("modulus probe is exact on affine fields") {
  const Field u = sampled_1d(257, [](double x) { return 0.7 * x + 0.1; });
  const fbl::ModulusReport r = fbl::modulus_probe(u, Rect{0.25, 0.75, 0.0, 0.0}, {0.5});
  CHECK(r.lipschitz == doctest::Approx(0.7).epsilon(1e-13));
  CHECK(r.margin == doctest::Approx(0.25).epsilon(1e-13));
  REQUIRE(r.holder.size() == 1);
  CHECK(r.holder[0].first == 0.5);
  // The widest pair spans the whole window, so sup |du|/sqrt(d) = 0.7 sqrt(0.5).
  CHECK(r.holder[0].second == doctest::Approx(0.7 * std::sqrt(0.5)).epsilon(1e-12));
  CHECK(r.log_lipschitz > 0.5);
  CHECK(r.log_lipschitz <= 0.7 + 1e-12);
  CHECK(r.pair_count > 0);

  Grid g2 = Grid::make_2d(0.0, 1.0, 0.0, 1.0, 33, 33);
  Field w(g2);
  for (int j = 0; j < 33; ++j)
    for (int i = 0; i < 33; ++i) w.at(i, j) = 0.3 * g2.x(i) + 0.4 * g2.y(j);
  const fbl::ModulusReport r2 =
      fbl::modulus_probe(w, Rect{0.25, 0.75, 0.25, 0.75}, {1.0});
  CHECK(r2.lipschitz == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("modulus probe insists on a 2h margin") {
  const Field u = sampled_1d(17, [](double x) { return x; });
  CHECK_THROWS_AS((void)fbl::modulus_probe(u, Rect{0.05, 0.95, 0.0, 0.0}, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)fbl::modulus_probe(u, Rect{0.6, 0.4, 0.0, 0.0}, {}),
                  std::invalid_argument);
}

TEST_CASE("harnack ratio matches the closed form on constants") {
  const Field u = sampled_1d(65, [](double) { return 2.0; });
  const auto growth = parse_orlicz("plap:2");
  // g(t) = 2t, so g^{-1}(R) R = 0.1 * 0.2 and the ratio is 2 / 2.02.
  CHECK(fbl::harnack_ratio(u, 0.5, 0.0, 0.1, 0.2, *growth) ==
        doctest::Approx(2.0 / 2.02).epsilon(1e-12));

  const Field neg = sampled_1d(65, [](double) { return -0.1; });
  CHECK_THROWS_AS((void)fbl::harnack_ratio(neg, 0.5, 0.0, 0.1, 0.2, *growth),
                  std::runtime_error);
  CHECK_THROWS_AS((void)fbl::harnack_ratio(u, 0.1, 0.0, 0.1, 0.2, *growth),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)fbl::harnack_ratio(u, 0.5, 0.0, 0.3, 0.2, *growth),
                  std::invalid_argument);
}

TEST_CASE("truncation iteration reproduces the self-similar trace") {
  const fbl::IterationCheck c = fbl::degiorgi_iterate(2.0, 4.0, 1.0, 0.125, 60);
  CHECK(c.threshold == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(c.below_threshold);
  CHECK(c.converged);
  REQUIRE(c.trace.size() == 61);
  for (int n = 0; n <= 40; ++n) {
    const double expected = 0.125 * std::pow(4.0, -n);
    CHECK(c.trace[static_cast<std::size_t>(n)] ==
          doctest::Approx(expected).epsilon(1e-12));
  }

  const fbl::IterationCheck hot = fbl::degiorgi_iterate(2.0, 4.0, 1.0, 1.0, 60);
  CHECK(!hot.converged);
  CHECK(!hot.below_threshold);
  CHECK(hot.overflow_index > 0);

  const fbl::IterationCheck zero = fbl::degiorgi_iterate(2.0, 4.0, 1.0, 0.0, 10);
  CHECK(zero.converged);

  CHECK_THROWS_AS((void)fbl::degiorgi_iterate(0.0, 4.0, 1.0, 0.125, 10),
                  std::invalid_argument);
}

TEST_CASE("termwise bound verification flags violations") {
  const std::vector<double> obeying = {0.125, 0.03125, 0.0078125};
  CHECK(fbl::degiorgi_verify_bound(2.0, 4.0, 1.0, obeying).bound_satisfied);
  const std::vector<double> violating = {0.125, 0.05};
  CHECK(!fbl::degiorgi_verify_bound(2.0, 4.0, 1.0, violating).bound_satisfied);
  CHECK_THROWS_AS((void)fbl::degiorgi_verify_bound(2.0, 4.0, 1.0, {}),
                  std::invalid_argument);
}

TEST_CASE("quadratic growth makes the replacement identity exact") {
  const Field u = sampled_1d(65, [](double x) { return x * (1.0 - x); });
  const auto growth = parse_orlicz("plap:2");
  const fbl::ReplacementReport r =
      fbl::energy_comparison_check(*growth, u, fbl::NodeBox{16, 48, 0, 0}, 0.5, {});
  CHECK(r.gap > 0.0);
  CHECK(r.empirical_c == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.region_radius == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(r.tail == doctest::Approx(std::pow(0.25, 0.25) * std::sqrt(r.gap)).epsilon(1e-12));

  const Field affine = sampled_1d(65, [](double x) { return 0.3 * x; });
  const fbl::ReplacementReport flat =
      fbl::energy_comparison_check(*growth, affine, fbl::NodeBox{16, 48, 0, 0}, 0.5, {});
  CHECK(flat.empirical_c == 0.0);

  const auto loglin = parse_orlicz("loglin");
  const fbl::ReplacementReport ll =
      fbl::energy_comparison_check(*loglin, u, fbl::NodeBox{16, 48, 0, 0}, 0.5, {});
  CHECK(std::isfinite(ll.lhs));
  CHECK(std::isfinite(ll.empirical_c));
  CHECK(ll.gap >= -1e-10);

  CHECK_THROWS_AS((void)fbl::energy_comparison_check(*growth, u,
                                                     fbl::NodeBox{16, 48, 0, 0}, 1.0, {}),
                  std::invalid_argument);
}

TEST_CASE("nonnegativity certificate reports the offending node") {
  Field u = sampled_1d(9, [](double x) { return x * (1.0 - x); });
  CHECK(fbl::nonnegativity_check(u, 1e-8).passed);
  u.at(3, 0) = -0.02;
  const fbl::NonnegativityReport r = fbl::nonnegativity_check(u, 1e-8);
  CHECK(!r.passed);
  CHECK(r.min_value == doctest::Approx(-0.02));
  CHECK(r.node_i == 3);
  CHECK(r.x == doctest::Approx(0.375).epsilon(1e-13));
}
