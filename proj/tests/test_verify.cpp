#include "doctest.h"
#include "reflectlab/grammar.hpp"
#include "reflectlab/parallel.hpp"
#include "reflectlab/verify.hpp"

using namespace reflectlab;

namespace {

double stat(const TestReport& r, const std::string& name) {
  for (const auto& s : r.statistics) {
    if (s.name == name) return s.value;
  }
  FAIL("missing statistic " << name);
  return 0.0;
}

}  // namespace

TEST_CASE("non-dyadic triples") {
  CHECK(check_non_dyadic_triple(Rational(1), Rational(2), Rational(3)));
  // 1/4 and 3/8 are dyadic, 1/6 is not
  CHECK(check_non_dyadic_triple(Rational(1), Rational(3), Rational(5)));
  CHECK(check_non_dyadic_triple(Rational(1, 2), Rational(3, 2), Rational(5, 2)));
  CHECK_THROWS_AS(check_non_dyadic_triple(Rational(2), Rational(1), Rational(3)), std::invalid_argument);
  CHECK_THROWS_AS(check_non_dyadic_triple(Rational(0), Rational(1), Rational(3)), std::invalid_argument);
  const TestReport r = non_dyadic_sweep(20);
  CHECK(r.verdict() == Verdict::Pass);
  CHECK(r.sample_sizes.at(0).second == 1140);  // C(20, 3)
}

TEST_CASE("exhaustive word suites at small n") {
  CHECK(g_power_exhaustive(6).verdict() == Verdict::Pass);
  CHECK(g_bijection_exhaustive(5).verdict() == Verdict::Pass);
}

TEST_CASE("functional vocabulary") {
  for (const char* t : {"value(1.5)", "max", "hit(-1)", "at(Tpm(1,2))"}) {
    CHECK(Functional::parse(t).describe() == t);
  }
  CHECK_THROWS_AS(Functional::parse("median"), std::invalid_argument);
  const Path p = Path::from_values({0.0, 1.0, 2.0}, std::vector<double>{0.0, 2.0, -1.0});
  CHECK(Functional::parse("value(0.5)")(p) == 1.0);
  CHECK(Functional::parse("max")(p) == 2.0);
  CHECK(Functional::parse("hit(1)")(p) == 0.5);
  CHECK(Functional::parse("hit(5)")(p) == 3.0);  // unobserved: horizon + 1
  CHECK(Functional::parse("at(hit(-1/2))")(p) == -0.5);
}

TEST_CASE("counterexample mean and invariance") {
  const Sampler ce = Sampler::parse("counterexample(T=6)", 0);
  // (c - 2)/2 with c = 3
  const TestReport ok = bound_check(ce, Rational(1), Rational(1), parse_rule("Tpm(2,3)"), 10.0, 20000, 1, 0.5);
  CHECK(ok.verdict() == Verdict::Pass);
  CHECK(stat(ok, "mean") == doctest::Approx(0.5).epsilon(0.05));
  CHECK_FALSE(ok.notes.empty());  // a/(a+b) = 1/2 is dyadic
  const TestReport off = bound_check(ce, Rational(1), Rational(1), parse_rule("Tpm(2,3)"), 10.0, 20000, 1, 0.7);
  CHECK(off.verdict() == Verdict::Fail);
  // the slowest branch reaches 3 at t = 5
  CHECK_THROWS_AS(bound_check(Sampler::parse("counterexample(T=4)", 0), Rational(1), Rational(1),
                              parse_rule("Tpm(2,3)"), 10.0, 100, 1),
                  HypothesisError);
  CHECK_THROWS_AS(bound_check(ce, Rational(1), Rational(1), parse_rule("Tpm(2,3)"), 2.5, 100, 1), HypothesisError);
  for (const char* t : {"fixed(0)", "Tpm(1,1)"}) {
    const StoppingRule rule = parse_rule(t);
    CHECK(invariance_test(ce, rule, default_functionals(ce, rule), 5000, 2).verdict() == Verdict::Pass);
  }
}

TEST_CASE("drift is caught by the invariance test") {
  const Sampler d = Sampler::parse("drift(mu=1,dt=0.01,T=2)", 0);
  const StoppingRule zero = StoppingRule::fixed(0.0);
  const TestReport r = invariance_test(d, zero, default_functionals(d, zero), 3000, 3);
  CHECK(r.verdict() == Verdict::Fail);
  CHECK(stat(r, "min_adjusted_p") < 1e-6);
  CHECK_THROWS(invariance_test(d, zero, {}, 100, 3));
}

TEST_CASE("martingale step identities") {
  const Sampler bm = Sampler::parse("bm(dt=0.005,T=100)", 0);
  const TestReport r = martingale_step_test(bm, Rational(1), Rational(2), 2, 3000, 4);
  CHECK(stat(r, "antisymmetry_failures") == 0.0);
  CHECK(r.statistics.size() >= 2 + 7);  // 2^(n_max+1) - 1 events
  CHECK(r.verdict() == Verdict::Pass);
  CHECK_THROWS_AS(martingale_step_test(bm, Rational(1), Rational(1), 2, 10, 4), DyadicRatio);
}

TEST_CASE("pathwise suites on a coarse grid") {
  const Sampler bm = Sampler::parse("bm(dt=0.01,T=10)", 0);
  const TestReport st = stability_suite(bm, 40, 5);
  CHECK(st.verdict() == Verdict::Pass);
  CHECK(stat(st, "formula_branch_s_after_t") > 0);
  CHECK(sign_identity_suite(bm, Rational(1), Rational(2), 6, 60, 6).verdict() == Verdict::Pass);
  const TestReport m = m_of_e_contract(Sampler::parse("bm(dt=0.01,T=3)", 0), Rational(1), Rational(2), 3, 5,
                                       20000, 7);
  CHECK(m.verdict() == Verdict::Pass);
  CHECK(m.details["words"].size() == 15);  // |Sigma_3| = 2^4 - 1
}

TEST_CASE("reports are deterministic across worker counts") {
  const Sampler bm = Sampler::parse("bm(dt=0.01,T=5)", 0);
  const StoppingRule rule = parse_rule("min(Tpm(1,1),fixed(3))");
  set_worker_count(1);
  const auto one = bound_check(bm, Rational(1), Rational(2), rule, 100.0, 2000, 9).to_json().dump();
  set_worker_count(3);
  const auto three = bound_check(bm, Rational(1), Rational(2), rule, 100.0, 2000, 9).to_json().dump();
  set_worker_count(0);
  CHECK(one == three);
}
