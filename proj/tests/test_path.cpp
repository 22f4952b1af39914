#include "doctest.h"
#include "reflectlab/path.hpp"

#include <sstream>
#include <stdexcept>
#include <vector>

using namespace reflectlab;

namespace {
Path line(std::vector<double> knots, std::vector<double> incs) {
  return Path::from_increments(std::move(knots), incs);
}
}  // namespace

TEST_CASE("value_at interpolates prefix sums") {
  const Path zero(3.0);
  CHECK(zero.value_at(1.7) == 0.0);
  const Path p = line({0, 1, 2}, {0, 1, -1});
  CHECK(p.value_at(1.0) == 1.0);
  CHECK(p.value_at(0.5) == 0.5);
  CHECK(p.value_at(2.0) == 0.0);
  CHECK_THROWS_AS(p.value_at(2.5), std::out_of_range);
  CHECK_THROWS_AS(p.value_at(-0.1), std::out_of_range);
}

TEST_CASE("path validation") {
  CHECK_THROWS_AS(Path::from_values({0, 1, 1}, std::vector<double>{0, 1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(Path::from_values({0.5, 1}, std::vector<double>{0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Path::from_values({0, 1}, std::vector<double>{1, 1}), std::invalid_argument);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Path::from_values({0, 1}, std::vector<double>{0, nan}), std::invalid_argument);
}

TEST_CASE("insert_knot") {
  const Path p = line({0, 2}, {0, 2});
  const Path q = insert_knot(p, 1.0, 1.0);
  REQUIRE(q.size() == 3);
  CHECK(q.increments() == std::vector<double>{0, 1, 1});
  CHECK(insert_knot(q, 1.0, 1.0) == q);
  CHECK_THROWS_AS(insert_knot(q, 1.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(insert_knot(p, 1.0, 3.0), std::invalid_argument);
  CHECK_NOTHROW(insert_knot(p, 1.0, 1.0 + 1e-12));
}

TEST_CASE("reflect_at_time") {
  const Path p = line({0, 1, 2}, {0, 1, 1});
  const Path r = reflect_at_time(p, 1.0);
  CHECK(r.increments() == std::vector<double>{0, 1, -1});
  const Path neg = reflect_at_time(p, 0.0);
  CHECK(neg.value_at(2.0) == -2.0);
  CHECK(neg.value_at(0.5) == -0.5);
  CHECK(reflect_at_time(reflect_at_time(p, 0.7), 0.7) == insert_knot(p, 0.7, 0.7));
  const Path mid = reflect_at_time(p, 0.5);
  CHECK(mid.value_at(2.0) == 2 * 0.5 - 2.0);
}

TEST_CASE("reflection pivots exactly on an inserted level") {
  const Path p = Path::from_values({0, 1}, std::vector<double>{0, 0.3});
  const double level = 0.1;
  const Path q = p.with_knot(1.0 / 3.0, to_ticks(level));
  const Path r = q.reflected_after_knot(1);
  CHECK(r.knot_ticks(1) == to_ticks(level));
  CHECK(r.reflected_after_knot(1) == q);
}

TEST_CASE("tick rounding is symmetric") {
  for (double x : {0.1, 1.0 / 3.0, 2.5e-13, 123.456, 0.5 * kTick, 1.5 * kTick}) {
    CHECK(to_ticks(-x) == -to_ticks(x));
    CHECK(to_ticks(Rational(-1) * Rational(1, 3)) == -to_ticks(Rational(1, 3)));
  }
  CHECK(to_ticks(Rational(1, 3)) == to_ticks(1.0 / 3.0));
}

TEST_CASE("truncate and splice") {
  const Path p = line({0, 1, 2, 3}, {0, 1, -2, 0.5});
  const Path t = p.truncated(1.5);
  CHECK(t.horizon() == 1.5);
  CHECK(t.value_at(1.5) == doctest::Approx(0.0));
  const Path tail = line({0, 1}, {0, 3});
  const Path s = p.spliced(1.0, tail);
  CHECK(s.horizon() == 2.0);
  CHECK(s.value_at(2.0) == 4.0);
}

TEST_CASE("csv round trip") {
  const Path p = line({0, 0.25, 1}, {0, 0.1, -0.7});
  const Path q = [&] {
    std::istringstream in(to_csv(p));
    return read_csv(in);
  }();
  CHECK(q == p);
  CHECK(to_csv(p).rfind("t,x\n", 0) == 0);
  std::istringstream bad("x,y\n0,0\n");
  CHECK_THROWS(read_csv(bad));
}

TEST_CASE("stop time ordering") {
  CHECK(StopTime(3.0) < StopTime::never());
  CHECK(StopTime::never() == StopTime::never());
  CHECK_FALSE(StopTime::never() < StopTime(1e9));
  CHECK(same_time(StopTime(1.0), StopTime(1.0 + 1e-12), 1e-9));
  CHECK_FALSE(same_time(StopTime(1.0), StopTime::never(), 1e-9));
}
