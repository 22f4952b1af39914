// Command-line runner: reflectlab run|ladder|lemmas|demo-counterexample
#include "reflectlab/experiment.hpp"
#include "reflectlab/grammar.hpp"
#include "reflectlab/samplers.hpp"
#include "reflectlab/stopping.hpp"
#include "reflectlab/verify.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace reflectlab;

namespace {

std::string now_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("REFLECTLAB_SEED");
  if (!s || !*s) return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != std::string(s).size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw std::invalid_argument(std::string("REFLECTLAB_SEED: not an unsigned integer: ") + s);
  }
}

int finish(const ExperimentConfig& cfg, const ExperimentResult& res, bool write) {
  std::cout << summary_csv(res.reports);
  if (write) {
    write_outputs(cfg, res, now_utc());
    std::cerr << "wrote " << (cfg.out / "report.json").string() << "\n";
  }
  return res.passed() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reflection-invariance experiments on sampled paths"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run an experiment described by a JSON config");
  std::string config_path;
  run->add_option("config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  std::optional<std::string> o_kind, o_law, o_a, o_b, o_out;
  std::vector<std::string> o_rules;
  std::optional<std::uint64_t> o_draws, o_seed;
  std::optional<std::size_t> o_n, o_workers, o_dump;
  std::optional<double> o_horizon, o_dt, o_alpha;
  run->add_option("--kind", o_kind);
  run->add_option("--law", o_law);
  run->add_option("--rule", o_rules, "Replaces the config rules");
  run->add_option("-a", o_a);
  run->add_option("-b", o_b);
  run->add_option("-n", o_n);
  run->add_option("-N,--draws", o_draws);
  run->add_option("--seed", o_seed);
  run->add_option("--horizon", o_horizon);
  run->add_option("--dt", o_dt);
  run->add_option("--alpha", o_alpha);
  run->add_option("--out", o_out);
  run->add_option("--dump-paths", o_dump);
  run->add_option("--workers", o_workers);

  // ladder
  auto* lad = app.add_subcommand("ladder", "Print the level sequence and a per-path tau table");
  std::string l_a = "1", l_b = "2", l_law = "bm(dt=1e-3,T=10)";
  std::size_t l_n = 16, l_paths = 5;
  std::uint64_t l_seed = 1;
  lad->add_option("-a", l_a, "p/q")->capture_default_str();
  lad->add_option("-b", l_b, "p/q")->capture_default_str();
  lad->add_option("-n", l_n)->capture_default_str();
  lad->add_option("--law", l_law)->capture_default_str();
  lad->add_option("--paths", l_paths)->capture_default_str();
  lad->add_option("--seed", l_seed)->capture_default_str();

  // lemmas
  auto* lem = app.add_subcommand("lemmas", "Exhaustive checks of the combinatorial lemmas");
  std::int64_t m_range = 200;
  std::size_t m_nmax = 12;
  std::optional<std::string> m_out;
  lem->add_option("--range", m_range)->capture_default_str();
  lem->add_option("--n-max", m_nmax)->capture_default_str();
  lem->add_option("--out", m_out);

  // demo-counterexample
  auto* demo = app.add_subcommand("demo-counterexample", "Two-segment dyadic example: E[X_S] and invariance");
  std::string d_c = "3";
  std::uint64_t d_draws = 100000, d_seed = 1;
  std::optional<std::string> d_out;
  demo->add_option("-c", d_c, "Upper level c > 2")->capture_default_str();
  demo->add_option("-N,--draws", d_draws)->capture_default_str();
  demo->add_option("--seed", d_seed)->capture_default_str();
  demo->add_option("--out", d_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;  // --help stays 0; usage errors are errors
  }

  try {
    if (run->parsed()) {
      std::ifstream f(config_path);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(f);
      } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(config_path + ": " + e.what());
      }
      // precedence: config < REFLECTLAB_SEED < flags
      if (auto s = env_seed()) j["seed"] = *s;
      if (o_kind) j["kind"] = *o_kind;
      if (o_law) j["law"] = *o_law;
      if (!o_rules.empty()) j["rules"] = o_rules;
      if (o_a) j["a"] = *o_a;
      if (o_b) j["b"] = *o_b;
      if (o_n) j["n"] = *o_n;
      if (o_draws) j["N"] = *o_draws;
      if (o_seed) j["seed"] = *o_seed;
      if (o_horizon) j["horizon"] = *o_horizon;
      if (o_dt) j["dt"] = *o_dt;
      if (o_alpha) j["alpha"] = *o_alpha;
      if (o_out) j["out"] = *o_out;
      if (o_dump) j["dump_paths"] = *o_dump;
      if (o_workers) j["workers"] = *o_workers;
      const ExperimentConfig cfg = ExperimentConfig::from_json(j);
      return finish(cfg, run_experiment(cfg), true);
    }

    if (lad->parsed()) {
      const Rational a = Rational::parse(l_a), b = Rational::parse(l_b);
      if (auto s = env_seed()) l_seed = *s;
      const LevelLadder ladder = ladder_levels(a, b, l_n);
      std::cout << "c:";
      for (std::size_t k = 0; k <= l_n; ++k) std::cout << (k ? "," : " ") << ladder.level(k).str();
      std::cout << "\nd:";
      for (std::size_t k = 1; k <= l_n; ++k) std::cout << (k > 1 ? "," : " ") << ladder.exit_side(k).str();
      std::cout << "\npath";
      for (std::size_t k = 0; k <= l_n; ++k) std::cout << ",tau" << k;
      std::cout << "\n";
      const Sampler s = Sampler::parse(l_law, l_seed);
      for (std::size_t i = 0; i < l_paths; ++i) {
        const LadderTimes lt = ladder_times(a, b, s.sample(i), l_n);
        std::cout << i;
        for (const StopTime t : lt.times) {
          std::cout << ",";
          if (t.observed()) std::cout << t.time();
        }
        std::cout << "\n";
      }
      return 0;
    }

    if (lem->parsed()) {
      ExperimentConfig cfg;
      cfg.kind = ExperimentKind::Lemmas;
      cfg.range = m_range;
      cfg.n_max = m_nmax;
      cfg.seed = 0;
      if (m_out) cfg.out = *m_out;
      return finish(cfg, run_experiment(cfg), m_out.has_value());
    }

    if (demo->parsed()) {
      const Rational c = Rational::parse(d_c);
      if (!(c > Rational(2))) throw std::invalid_argument("demo-counterexample: c must exceed 2");
      if (auto s = env_seed()) d_seed = *s;
      const double horizon = 3.0 + c.to_double();  // the slowest branch hits c at time c + 2
      const StoppingRule stop = StoppingRule::two_sided(Rational(2), c);
      ExperimentConfig cfg;
      cfg.kind = ExperimentKind::Bound;
      cfg.law = "counterexample(T=" + std::to_string(horizon) + ")";
      cfg.rules = {stop.describe()};
      cfg.a = cfg.b = "1";
      cfg.expected = (c.to_double() - 2.0) / 2.0;
      cfg.draws = d_draws;
      cfg.seed = d_seed;
      if (d_out) cfg.out = *d_out;
      const Sampler s = Sampler::parse(cfg.law, d_seed);
      ExperimentResult res;
      res.reports.push_back(bound_check(s, Rational(1), Rational(1), stop, c.to_double() + 1.0, d_draws, d_seed,
                                        cfg.expected));
      for (const StoppingRule& t : {StoppingRule::fixed(0.0), StoppingRule::two_sided(Rational(1), Rational(1))}) {
        res.reports.push_back(invariance_test(s, t, default_functionals(s, t), d_draws, d_seed));
      }
      return finish(cfg, res, d_out.has_value());
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
