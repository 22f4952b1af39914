#include "doctest.h"
#include "reflectlab/rational.hpp"

#include <stdexcept>

using reflectlab::Rational;

TEST_CASE("rational parse and normalize") {
  CHECK(Rational::parse("2/4") == Rational(1, 2));
  CHECK(Rational::parse("-3/6").str() == "-1/2");
  CHECK(Rational::parse("5").is_integer());
  CHECK(Rational::parse(" 7/1 ") == Rational(7));
  CHECK_THROWS_AS(Rational::parse("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(Rational::parse("abc"), std::invalid_argument);
  CHECK_THROWS_AS(Rational::parse("1.5"), std::invalid_argument);
}

TEST_CASE("rational arithmetic and order") {
  const Rational a = Rational::parse("1/3");
  const Rational b = Rational::parse("1/6");
  CHECK(a + b == Rational(1, 2));
  CHECK(a - b == b);
  CHECK(a * b == Rational(1, 18));
  CHECK(a / b == Rational(2));
  CHECK(b < a);
  CHECK(-a < b);
  CHECK(abs(-a) == a);
}

TEST_CASE("dyadic test") {
  CHECK(Rational(1, 4).is_dyadic());
  CHECK(Rational(3, 8).is_dyadic());
  CHECK(Rational(6, 4).is_dyadic());
  CHECK_FALSE(Rational(1, 3).is_dyadic());
  CHECK_FALSE(Rational(1, 6).is_dyadic());
  CHECK(Rational(5).is_dyadic());
}

TEST_CASE("to_double rounds to nearest") {
  CHECK(Rational(1, 3).to_double() == 1.0 / 3.0);
  CHECK(Rational(-2, 3).to_double() == -2.0 / 3.0);
  CHECK(Rational(1, 10).to_double() == 0.1);
  CHECK(Rational(0).to_double() == 0.0);
  const reflectlab::BigInt big = reflectlab::BigInt(1) << 200;
  CHECK(Rational(big + 1, big).to_double() == 1.0);
}
