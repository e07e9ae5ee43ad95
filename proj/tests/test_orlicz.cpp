#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "fbl/orlicz.hpp"

using fbl::ConjugatePair;
using fbl::invert_g;
using fbl::make_orlicz;
using fbl::make_nonlinearity;
using fbl::parse_nonlinearity;
using fbl::parse_orlicz;
using fbl::with_claimed_exponents;

namespace {
constexpr double kLn2 = 0.6931471805599453;
}

TEST_CASE("plap closed forms and exponents") {
  auto fn = parse_orlicz("plap:2");
  CHECK(fn->label() == "plap:2");
  CHECK(fn->g(3.0) == doctest::Approx(6.0));
  CHECK(fn->g_prime(3.0) == doctest::Approx(2.0));
  CHECK(fn->G(3.0) == doctest::Approx(9.0));
  CHECK(fn->delta0() == 1.0);
  CHECK(fn->g0() == 1.0);
  CHECK(fn->has_closed_form_G());
  CHECK(fn->knots().empty());

  auto sub = parse_orlicz("plap:1.5");
  CHECK(sub->g(4.0) == doctest::Approx(3.0));
  CHECK(sub->G(4.0) == doctest::Approx(8.0));
  CHECK(sub->delta0() == doctest::Approx(0.5));
}

TEST_CASE("loglin values agree with (1+t)ln(1+t) - t and its integral") {
  auto fn = parse_orlicz("loglin");
  CHECK(fn->g(1.0) == doctest::Approx(2.0 * kLn2 - 1.0).epsilon(1e-14));
  CHECK(fn->g_prime(1.0) == doctest::Approx(kLn2).epsilon(1e-14));
  CHECK(fn->G(1.0) == doctest::Approx(2.0 * kLn2 - 1.25).epsilon(1e-14));
  CHECK(fn->delta0() == 1.0);
  CHECK(fn->g0() == 2.0);
  // The series branch must agree with the closed form where both work, and
  // stay accurate where the closed form cancels.
  CHECK(fn->g(0.4999) ==
        doctest::Approx((1.4999) * std::log1p(0.4999) - 0.4999).epsilon(1e-12));
  CHECK(fn->g(1e-8) == doctest::Approx(0.5e-16).epsilon(1e-6));
}

TEST_CASE("logsum(1,1) combines the log and quadratic pieces") {
  auto fn = parse_orlicz("logsum:1,1");
  CHECK(fn->g(1.0) == doctest::Approx(kLn2 + 1.0).epsilon(1e-14));
  CHECK(fn->G(1.0) == doctest::Approx(2.0 * kLn2 - 0.5).epsilon(1e-14));
  CHECK(fn->delta0() == doctest::Approx(0.5));
  CHECK(fn->g0() == doctest::Approx(2.0));
}

TEST_CASE("tlog and tdivlog evaluate g in the stated base and integrate G") {
  auto tl = parse_orlicz("tlog:1,1,2,2");
  CHECK(tl->g(2.0) == doctest::Approx(4.0).epsilon(1e-14));  // 2 * log2(4)
  CHECK(tl->delta0() == doctest::Approx(1.0));
  CHECK(tl->g0() == doctest::Approx(1.0 + 1.0 / kLn2));
  CHECK(!tl->has_closed_form_G());
  // integral of t*log2(t+2) over [0,2] = 2 + 1/ln 2; see tools/reference_values.py.
  CHECK(tl->G(2.0) == doctest::Approx(2.0 + 1.0 / kLn2).epsilon(1e-10));

  auto td = parse_orlicz("tdivlog:2,1,2,2");
  CHECK(td->g(2.0) == doctest::Approx(2.0).epsilon(1e-14));  // 4 / log2(4)
  CHECK(td->delta0() == doctest::Approx(2.0 - 1.0 / kLn2));
  CHECK(td->g0() == doctest::Approx(2.0));
}

TEST_CASE("piecewise family matches its two branches and reports the knot") {
  auto fn = parse_orlicz("piecewise:2,1,1,1,2,1");
  CHECK(fn->g(0.5) == doctest::Approx(1.0));        // 2t below the knot
  CHECK(fn->g(2.0) == doctest::Approx(5.0));        // t^2 + 1 above
  CHECK(fn->G(1.0) == doctest::Approx(1.0));
  CHECK(fn->G(2.0) == doctest::Approx(13.0 / 3.0));
  CHECK(fn->knots() == std::vector<double>{1.0});
  CHECK(fn->delta0() == 1.0);
  CHECK(fn->g0() == 2.0);
}

TEST_CASE("catalog rejects invalid parameters with the constraint named") {
  CHECK_THROWS_WITH_AS((void)parse_orlicz("plap:1"), doctest::Contains("p > 1"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS((void)parse_orlicz("logsum:1"), doctest::Contains("parameter"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS((void)parse_orlicz("logsum:0,1"), doctest::Contains("a > 0"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS((void)parse_orlicz("tdivlog:0.5,1,2,2"),
                       doctest::Contains("1/ln(d)"), std::invalid_argument);
  // Breaking C1 matching at the knot is rejected even when continuity holds.
  CHECK_THROWS_AS((void)parse_orlicz("piecewise:2,0.5,1.5,1,2,1"), std::invalid_argument);
  CHECK_THROWS_AS((void)parse_orlicz("nosuch:1"), std::invalid_argument);
  CHECK_THROWS_AS((void)parse_orlicz("plap:abc"), std::invalid_argument);
  CHECK_THROWS_AS((void)make_orlicz("loglin", {1.0}), std::invalid_argument);
}

TEST_CASE("domain guards on g, g_prime, F") {
  auto fn = parse_orlicz("plap:2");
  CHECK_THROWS_AS((void)fn->g(-1.0), std::domain_error);
  CHECK_THROWS_AS((void)fn->g_prime(0.0), std::domain_error);
  auto nl = parse_nonlinearity("power-F:1");
  CHECK_THROWS_AS((void)nl->F(-0.1), std::domain_error);
}

TEST_CASE("conjugate pair: inverse and Young conjugate of plap(2)") {
  auto fn = parse_orlicz("plap:2");
  ConjugatePair conj(fn);
  CHECK(conj.g_inverse(6.0) == doctest::Approx(3.0).epsilon(1e-12));
  // G~(s) = s^2/4 for g(t) = 2t.
  CHECK(conj.G_tilde(4.0) == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(conj.G_tilde(0.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS((void)conj.G_tilde(-1.0), std::domain_error);
}

TEST_CASE("invert_g round-trips g across magnitudes for a log-type family") {
  auto fn = parse_orlicz("loglin");
  for (double t : {1e-3, 0.7, 17.3, 1e4}) {
    CHECK(invert_g(*fn, fn->g(t)) == doctest::Approx(t).epsilon(1e-10));
  }
  CHECK(invert_g(*fn, 0.0) == 0.0);
  CHECK_THROWS_AS((void)invert_g(*fn, -1.0), std::domain_error);
}

TEST_CASE("power-F nonlinearity exponents and the singular-at-zero guard") {
  auto nl = parse_nonlinearity("power-F:2");
  CHECK(nl->F(3.0) == doctest::Approx(9.0));
  CHECK(nl->f(3.0) == doctest::Approx(6.0));
  CHECK(nl->theta0() == doctest::Approx(1.0));
  CHECK(nl->f0() == doctest::Approx(1.0));
  CHECK(nl->increasing());
  CHECK(nl->f_continuous_at_zero());

  auto weak = parse_nonlinearity("power-F:0.5");
  CHECK(weak->theta0() == doctest::Approx(-0.5));
  CHECK(!weak->f_continuous_at_zero());
  CHECK_THROWS_AS((void)weak->f(0.0), std::domain_error);
  CHECK(weak->F(0.0) == 0.0);

  CHECK_THROWS_AS((void)make_nonlinearity("power-F", {0.0}), std::invalid_argument);
  CHECK_THROWS_AS((void)parse_nonlinearity("exp-F:1"), std::invalid_argument);
}

TEST_CASE("with_claimed_exponents overrides the reported pinch only") {
  auto base = parse_orlicz("plap:2");
  auto claimed = with_claimed_exponents(base, 0.5, 3.0);
  CHECK(claimed->delta0() == 0.5);
  CHECK(claimed->g0() == 3.0);
  CHECK(claimed->g(3.0) == base->g(3.0));
  CHECK(claimed->G(2.0) == base->G(2.0));
  CHECK_THROWS_AS((void)with_claimed_exponents(base, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)with_claimed_exponents(base, 0.0, 1.0), std::invalid_argument);
}
