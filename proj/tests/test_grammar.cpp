#include "doctest.h"
#include "reflectlab/grammar.hpp"

using namespace reflectlab;

TEST_CASE("rule grammar round trips") {
  for (const char* text :
       {"fixed(0)", "fixed(2.5)", "hit(1)", "hit(-1/3)", "hit(0.75)", "Tpm(1,2)", "Tpm(0.5,0.5)", "tau(1,2,8)",
        "tau(1/3,5/7,3)", "min(Tpm(1,2),fixed(5))", "max(hit(-1),fixed(1))", "compose(hit(1),fixed(0))",
        "mix(pos(fixed(1))?max(fixed(1),hit(3/2)):max(fixed(1),hit(-3/2)))",
        "mix(le(hit(1),hit(-1))?max(hit(1),hit(-1)):seen(hit(2))?max(hit(2),hit(1)):max(hit(2),max(hit(1),hit(-1))))"}) {
    CAPTURE(text);
    const StoppingRule r = parse_rule(text);
    CHECK(r.describe() == text);
    CHECK(parse_rule(r.describe()) == r);
  }
}

TEST_CASE("rule grammar accepts spaces and reports errors") {
  CHECK(parse_rule(" min( Tpm(1, 2) , fixed(5) ) ").describe() == "min(Tpm(1,2),fixed(5))");
  CHECK_THROWS_AS(parse_rule("Tpm(1,2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rule("foo(1)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rule("tau(0.5,2,3)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rule("tau(1,3,3)"), DyadicRatio);
  CHECK_THROWS_AS(parse_rule("fixed(1) x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rule("mix(pos(fixed(1))?fixed(0.5):fixed(2))"), std::invalid_argument);
}

TEST_CASE("event grammar") {
  CHECK(parse_event("neg(Tpm(1,1))").describe() == "neg(Tpm(1,1))");
  CHECK_THROWS(parse_event("odd(fixed(1))"));
}
