#include "doctest.h"
#include "reflectlab/experiment.hpp"
#include "reflectlab/stopping.hpp"

#include <fstream>
#include <sstream>

using namespace reflectlab;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("law spec arguments") {
  CHECK(set_spec_arg("bm(dt=1e-3,T=10)", "T", "5") == "bm(dt=1e-3,T=5)");
  CHECK(set_spec_arg("bm(dt=1e-3)", "T", "5") == "bm(dt=1e-3,T=5)");
  CHECK(set_spec_arg("counterexample()", "T", "6") == "counterexample(T=6)");
  CHECK(set_spec_arg("counterexample", "T", "6") == "counterexample(T=6)");
  ExperimentConfig c;
  c.horizon = 3.0;
  c.dt = 0.01;
  CHECK(c.effective_law() == "bm(dt=0.01,T=3)");
}

TEST_CASE("config parsing") {
  auto j = nlohmann::json::parse(R"j({"kind":"bound","law":"bm(dt=0.01,T=5)","rules":"min(Tpm(1,1),fixed(2))",
                                     "a":"1/1","b":2,"N":100,"seed":3})j");
  const ExperimentConfig c = ExperimentConfig::from_json(j);
  CHECK(c.kind == ExperimentKind::Bound);
  CHECK(c.rules.size() == 1);
  CHECK(c.b == "2");
  CHECK_THROWS_AS(ExperimentConfig::from_json(nlohmann::json::parse(R"j({"kind":"suite","typo":1})j")),
                  std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json(nlohmann::json::parse(R"j({"kind":"bound"})j")), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json(nlohmann::json::parse(R"j({"N":0})j")), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json(nlohmann::json::parse(R"j({"a":"1/0"})j")), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json(nlohmann::json::parse(R"j({"a":0.5})j")), std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json(nlohmann::json::parse(R"j({"kind":"ladder","a":"1","b":"3"})j")),
                  DyadicRatio);
}

TEST_CASE("lemmas experiment") {
  ExperimentConfig c;
  c.kind = ExperimentKind::Lemmas;
  c.range = 30;
  c.n_max = 6;
  const ExperimentResult r = run_experiment(c);
  CHECK(r.reports.size() == 3);
  CHECK(r.passed());
}

TEST_CASE("ladder experiment") {
  ExperimentConfig c;
  c.kind = ExperimentKind::Ladder;
  c.law = "bm(dt=0.01,T=5)";
  c.n = 16;
  c.draws = 4;
  c.dump_paths = 2;
  const ExperimentResult r = run_experiment(c);
  REQUIRE(r.reports.size() == 1);
  CHECK(r.passed());
  const auto& levels = r.reports[0].details["levels"];
  CHECK(levels.size() == 17);
  CHECK(levels[0] == "0");
  CHECK(r.reports[0].details["tau"].size() == 4);
  CHECK(r.paths.size() == 2);
}

TEST_CASE("negative control exits with a failed verdict") {
  ExperimentConfig c;
  c.kind = ExperimentKind::Invariance;
  c.law = "drift(0.5)";
  c.rules = {"fixed(0)"};
  c.draws = 4000;
  CHECK_FALSE(run_experiment(c).passed());
}

TEST_CASE("identical config gives identical report apart from the timestamp") {
  ExperimentConfig c;
  c.kind = ExperimentKind::Bound;
  c.law = "bm(dt=0.01,T=5)";
  c.rules = {"min(Tpm(1/2,1/2),fixed(1))", "min(Tpm(1,1),fixed(2))"};
  c.draws = 500;
  c.dump_paths = 1;
  c.out = std::filesystem::temp_directory_path() / "reflectlab_test_out";
  std::filesystem::remove_all(c.out);
  write_outputs(c, run_experiment(c), "T1");
  const std::string first = slurp(c.out / "report.json");
  c.workers = 2;
  write_outputs(c, run_experiment(c), "T1");
  CHECK(slurp(c.out / "report.json") == first);
  const std::string csv = slurp(c.out / "summary.csv");
  CHECK(csv.rfind("test,statistic,threshold,verdict,seed\nbound_check,", 0) == 0);
  CHECK(slurp(c.out / "paths.csv").rfind("path,t,x\n0,0,0\n", 0) == 0);
  write_outputs(c, run_experiment(c), "T2");
  auto j = nlohmann::json::parse(slurp(c.out / "report.json"));
  auto k = nlohmann::json::parse(first);
  CHECK(j["generated_at"] != k["generated_at"]);
  j.erase("generated_at");
  k.erase("generated_at");
  CHECK(j == k);
  std::filesystem::remove_all(c.out);
}
