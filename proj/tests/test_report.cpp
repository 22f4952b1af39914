#include "doctest.h"
#include "reflectlab/report.hpp"

#include <cmath>

using namespace reflectlab;

namespace {

Statistic make(std::string name, double v, double thr, Check c) {
  Statistic s;
  s.name = std::move(name);
  s.value = v;
  s.threshold = thr;
  s.check = c;
  return s;
}

}  // namespace

TEST_CASE("verdict follows the statistics") {
  TestReport r;
  r.name = "t";
  CHECK(r.verdict() == Verdict::Skipped);
  r.add(make("info", 1e9, 0, Check::Info));
  CHECK(r.verdict() == Verdict::Skipped);
  CHECK(r.passed());
  r.add(make("p", 0.5, 0.001, Check::Above));
  CHECK(r.verdict() == Verdict::Pass);
  r.add_count("failures", 0);
  CHECK(r.verdict() == Verdict::Pass);
  r.add_count("more_failures", 1);
  CHECK(r.verdict() == Verdict::Fail);
  CHECK_FALSE(r.passed());
}

TEST_CASE("above is strict, at_most is not") {
  CHECK_FALSE(make("x", 0.001, 0.001, Check::Above).passes());
  CHECK(make("x", 4.0, 4.0, Check::AtMost).passes());
  CHECK_FALSE(make("x", NAN, 4.0, Check::AtMost).passes());
}

TEST_CASE("json round trip keeps the verdict") {
  TestReport r;
  r.name = "bound_check";
  r.seed = 42;
  r.params["rule"] = "Tpm(1,2)";
  Statistic s = make("z", INFINITY, 4.0, Check::AtMost);
  s.standard_error = 0.25;
  s.note = "n";
  r.add(s);
  r.add(make("mean", -NAN, 0, Check::Info));
  r.sample_sizes.emplace_back("draws", 7);
  r.notes.push_back("dyadic");
  r.details["k"] = 1;
  r.primary = 0;
  const auto j = r.to_json();
  CHECK(j["statistics"][0]["value"] == "inf");
  CHECK(j["verdict"] == "fail");
  const TestReport back = TestReport::from_json(nlohmann::ordered_json::parse(j.dump()));
  CHECK(back.to_json() == j);
  CHECK(back.verdict() == Verdict::Fail);
  CHECK(*back.statistics[0].standard_error == 0.25);
}

TEST_CASE("csv row") {
  TestReport r;
  r.name = "a,b";
  r.add(make("p", 0.5, 0.001, Check::Above));
  CHECK(r.csv_row() == "\"a,b\",p=0.5,>0.001,pass,");
  r.seed = 3;
  r.primary = 7;  // out of range: empty statistic columns
  CHECK(r.csv_row() == "\"a,b\",,,pass,3");
  CHECK(std::string(kCsvHeader) == "test,statistic,threshold,verdict,seed");
}
