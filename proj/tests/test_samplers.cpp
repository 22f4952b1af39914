#include "doctest.h"
#include "reflectlab/samplers.hpp"

#include <cmath>
#include <map>

using namespace reflectlab;

TEST_CASE("sampler parameter validation") {
  CHECK_THROWS_AS(Sampler(BrownianLaw{0.0, 1.0}, 1), std::invalid_argument);
  CHECK_THROWS_AS(Sampler(BrownianLaw{1e-3, -1.0}, 1), std::invalid_argument);
  CHECK_THROWS_AS(Sampler(CounterexampleLaw{0.5}, 1), std::invalid_argument);
  CHECK_THROWS(Sampler::parse("nope()", 1));
  CHECK_THROWS(Sampler::parse("bm(dt=0)", 1));
}

TEST_CASE("sampler parse round trip") {
  for (const char* spec : {"bm(dt=1e-3,T=10)", "counterexample()", "ocone(clock=randrate,T=10)",
                           "stopped(level=1,mode=ramp)", "drift(0.5)", "ocone(clock=randstop,dt=0.01,T=2)"}) {
    const Sampler s = Sampler::parse(spec, 3);
    const Sampler t = Sampler::parse(s.describe(), 3);
    CHECK(s.describe() == t.describe());
    CHECK(s.sample(5) == t.sample(5));
  }
}

TEST_CASE("draws are reproducible and indexed") {
  const Sampler s = Sampler::parse("bm(dt=1e-2,T=2)", 42);
  CHECK(s.sample(3) == s.sample(3));
  CHECK_FALSE(s.sample(3) == s.sample(4));
  CHECK_FALSE(s.sample(3) == s.with_seed(43).sample(3));
  CHECK(s.sample(0).size() == 201);
}

TEST_CASE("sample_until is a prefix of sample") {
  const Sampler s = Sampler::parse("bm(dt=1e-3,T=10)", 9);
  const auto rule = StoppingRule::two_sided(1.0, 1.0);
  for (std::uint64_t i = 0; i < 20; ++i) {
    const Path full = s.sample(i);
    const Path part = s.sample_until(i, rule);
    CHECK(part.horizon() <= full.horizon());
    CHECK(part == full.truncated(part.horizon()));
    CHECK(evaluate(rule, part) == evaluate(rule, full));
  }
}

TEST_CASE("counterexample law") {
  const Sampler s(CounterexampleLaw{}, 5);
  const auto t = StoppingRule::two_sided(1.0, 1.0);
  std::map<double, int> counts;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const Path p = s.sample(i);
    CHECK(evaluate(t, p) == StopTime(1.0));
    counts[p.value_at(2.0)]++;
  }
  CHECK(counts.size() == 3);
  CHECK(std::abs(counts[-2.0] / double(n) - 0.25) < 0.02);
  CHECK(std::abs(counts[0.0] / double(n) - 0.5) < 0.02);
  CHECK(std::abs(counts[2.0] / double(n) - 0.25) < 0.02);
}

TEST_CASE("brownian marginal moments") {
  const Sampler s = Sampler::parse("bm(dt=1e-2,T=2)", 77);
  const int n = 20000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double x = s.sample(i).value_at(2.0);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 4 * std::sqrt(2.0 / n));
  CHECK(std::abs(var - 2.0) < 4 * 2.0 * std::sqrt(2.0 / n));
}

TEST_CASE("stopped symmetric law freezes at the level") {
  for (const char* spec : {"stopped(level=1)", "stopped(level=0.5,mode=ramp)"}) {
    const Sampler s = Sampler::parse(spec, 1);
    for (std::uint64_t i = 0; i < 50; ++i) {
      const Path p = s.sample(i);
      const StopTime hit = evaluate(StoppingRule::two_sided(s.describe().find("0.5") != std::string::npos ? 0.5 : 1.0,
                                                            s.describe().find("0.5") != std::string::npos ? 0.5 : 1.0),
                                    p);
      if (!hit.observed()) continue;
      CHECK(p.value_at(p.horizon()) == p.value_at(hit.time()));
    }
  }
}

TEST_CASE("ocone clocks are continuous and start at zero") {
  for (const char* spec : {"ocone(clock=identity,dt=1e-2,T=3)", "ocone(clock=randrate,dt=1e-2,T=3)",
                           "ocone(clock=randstop,dt=1e-2,T=3)"}) {
    const Sampler s = Sampler::parse(spec, 2);
    const Path p = s.sample(0);
    CHECK(p.value_at(0.0) == 0.0);
    CHECK(p.horizon() == 3.0);
  }
}
