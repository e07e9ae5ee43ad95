#include <stdexcept>

#include "doctest.h"
#include "fbl/expression.hpp"

using fbl::Expression;

TEST_CASE("expression grammar: precedence, power associativity, functions") {
  CHECK(Expression::parse("0.25*x^2").eval(2.0) == doctest::Approx(1.0));
  CHECK(Expression::parse("1+2*3^2").eval(0.0) == doctest::Approx(19.0));
  // Power is right-associative: 2^(3^2).
  CHECK(Expression::parse("2^3^2").eval(0.0) == doctest::Approx(512.0));
  CHECK(Expression::parse("-x^2").eval(3.0) == doctest::Approx(-9.0));
  CHECK(Expression::parse("min(x, y) + max(x, y)").eval(2.0, 5.0) == doctest::Approx(7.0));
  CHECK(Expression::parse("abs(x - 3)").eval(1.0) == doctest::Approx(2.0));
  CHECK(Expression::parse("(x + 1)*(x - 1)").eval(4.0) == doctest::Approx(15.0));
  // y defaults to 0 for 1D callers.
  CHECK(Expression::parse("x + y").eval(2.5) == doctest::Approx(2.5));
}

TEST_CASE("expression copies evaluate independently of the original") {
  Expression a = Expression::parse("x^2");
  Expression b = a;
  CHECK(b.eval(3.0) == doctest::Approx(9.0));
  CHECK(a.text() == "x^2");
}

TEST_CASE("expression parse errors carry the offending input") {
  CHECK_THROWS_AS((void)Expression::parse("x +"), std::invalid_argument);
  CHECK_THROWS_AS((void)Expression::parse("foo(x)"), std::invalid_argument);
  CHECK_THROWS_AS((void)Expression::parse("x / 2"), std::invalid_argument);
  CHECK_THROWS_AS((void)Expression::parse("(x"), std::invalid_argument);
  CHECK_THROWS_AS((void)Expression::parse(""), std::invalid_argument);
  CHECK_THROWS_AS((void)Expression::parse("min(x)"), std::invalid_argument);
}
