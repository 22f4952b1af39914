#include "reflectlab/experiment.hpp"

#include "reflectlab/grammar.hpp"
#include "reflectlab/parallel.hpp"
#include "reflectlab/samplers.hpp"
#include "reflectlab/stopping.hpp"
#include "reflectlab/verify.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace reflectlab {

namespace {

const std::pair<ExperimentKind, const char*> kKinds[] = {
    {ExperimentKind::Invariance, "invariance"}, {ExperimentKind::Bound, "bound"},
    {ExperimentKind::Ladder, "ladder"},         {ExperimentKind::Signs, "signs"},
    {ExperimentKind::Suite, "suite"},           {ExperimentKind::Lemmas, "lemmas"},
    {ExperimentKind::Martingale, "martingale"},
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Exact fields may be written as JSON integers or as "p/q" strings.
std::string rational_field(const nlohmann::json& v, const char* key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  throw std::invalid_argument(std::string("config: '") + key + "' must be a \"p/q\" string or an integer");
}

std::vector<std::string> string_list(const nlohmann::json& v, const char* key) {
  if (v.is_string()) return {v.get<std::string>()};
  if (!v.is_array()) throw std::invalid_argument(std::string("config: '") + key + "' must be a string or array");
  std::vector<std::string> out;
  for (const auto& e : v) out.push_back(e.get<std::string>());
  return out;
}

TestReport ladder_report(const ExperimentConfig& cfg, const Sampler& sampler,
                         std::vector<std::vector<std::pair<double, double>>>& dumps) {
  const Rational a = Rational::parse(cfg.a);
  const Rational b = Rational::parse(cfg.b);
  const LevelLadder ladder = ladder_levels(a, b, cfg.n);
  TestReport r;
  r.name = "ladder";
  r.seed = cfg.seed;
  r.params["law"] = sampler.describe();
  r.params["a"] = a.str();
  r.params["b"] = b.str();
  r.params["n"] = cfg.n;
  std::uint64_t bad = 0;
  auto levels = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k <= cfg.n; ++k) {
    const Rational& c = ladder.level(k);
    levels.push_back(c.str());
    if (!(-a < c && c < b)) ++bad;
    if (k > 0 && (ladder.level(k) + ladder.exit_side(k)) / Rational(2) != ladder.level(k - 1)) ++bad;
  }
  r.details["levels"] = levels;
  r.add_count("level_invariant_failures", bad, "c_n in (-a,b) and c_{n-1} = (c_n + d_n)/2");

  auto table = nlohmann::ordered_json::array();
  const std::size_t shown = std::min<std::uint64_t>(cfg.draws, 1000);
  for (std::size_t i = 0; i < shown; ++i) {
    const Path p = sampler.sample(i);
    const LadderTimes lt = ladder_times(a, b, p, cfg.n);
    auto row = nlohmann::ordered_json::array();
    for (const StopTime t : lt.times) row.push_back(t.observed() ? nlohmann::ordered_json(t.time()) : nullptr);
    table.push_back(std::move(row));
    if (i < cfg.dump_paths) {
      auto& d = dumps.emplace_back();
      for (std::size_t j = 0; j < p.size(); ++j) d.emplace_back(p.knot_time(j), p.knot_value(j));
    }
  }
  r.details["tau"] = table;
  r.sample_sizes.emplace_back("paths", shown);
  return r;
}

}  // namespace

std::string to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kKinds) {
    if (kind == k) return name;
  }
  return "suite";
}

ExperimentKind parse_kind(const std::string& s) {
  for (const auto& [kind, name] : kKinds) {
    if (s == name) return kind;
  }
  throw std::invalid_argument("config: unknown experiment kind '" + s + "'");
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  static const std::set<std::string> known{"kind",  "law",       "rules",        "functionals", "a",         "b",
                                           "n",     "N",         "seed",         "horizon",     "dt",        "out",
                                           "alpha", "bound_cap", "expected",     "min_per_word", "max_draws", "range",
                                           "n_max", "dump_paths", "workers"};
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw std::invalid_argument("config: unknown key '" + k + "'");
  }
  ExperimentConfig c;
  try {
    if (j.contains("kind")) c.kind = parse_kind(j["kind"].get<std::string>());
    if (j.contains("law")) c.law = j["law"].get<std::string>();
    if (j.contains("rules")) c.rules = string_list(j["rules"], "rules");
    if (j.contains("functionals")) c.functionals = string_list(j["functionals"], "functionals");
    if (j.contains("a")) c.a = rational_field(j["a"], "a");
    if (j.contains("b")) c.b = rational_field(j["b"], "b");
    if (j.contains("n")) c.n = j["n"].get<std::size_t>();
    if (j.contains("N")) c.draws = j["N"].get<std::uint64_t>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("horizon")) c.horizon = j["horizon"].get<double>();
    if (j.contains("dt")) c.dt = j["dt"].get<double>();
    if (j.contains("out")) c.out = j["out"].get<std::string>();
    if (j.contains("alpha")) c.alpha = j["alpha"].get<double>();
    if (j.contains("bound_cap")) c.bound_cap = j["bound_cap"].get<double>();
    if (j.contains("expected")) c.expected = j["expected"].get<double>();
    if (j.contains("min_per_word")) c.min_per_word = j["min_per_word"].get<std::uint64_t>();
    if (j.contains("max_draws")) c.max_draws = j["max_draws"].get<std::uint64_t>();
    if (j.contains("range")) c.range = j["range"].get<std::int64_t>();
    if (j.contains("n_max")) c.n_max = j["n_max"].get<std::size_t>();
    if (j.contains("dump_paths")) c.dump_paths = j["dump_paths"].get<std::size_t>();
    if (j.contains("workers")) c.workers = j["workers"].get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = to_string(kind);
  j["law"] = law;
  j["rules"] = rules;
  j["functionals"] = functionals;
  j["a"] = a;
  j["b"] = b;
  j["n"] = n;
  j["N"] = draws;
  j["seed"] = seed;
  j["horizon"] = horizon ? nlohmann::ordered_json(*horizon) : nlohmann::ordered_json(nullptr);
  j["dt"] = dt ? nlohmann::ordered_json(*dt) : nlohmann::ordered_json(nullptr);
  j["alpha"] = alpha;
  j["bound_cap"] = bound_cap;
  j["expected"] = expected ? nlohmann::ordered_json(*expected) : nlohmann::ordered_json(nullptr);
  j["min_per_word"] = min_per_word;
  j["max_draws"] = max_draws;
  j["range"] = range;
  j["n_max"] = n_max;
  j["dump_paths"] = dump_paths;
  // out and workers do not change the results and stay out of the report
  return j;
}

std::string set_spec_arg(const std::string& spec, const std::string& key, const std::string& value) {
  const auto open = spec.find('(');
  if (open == std::string::npos) return spec + "(" + key + "=" + value + ")";
  const auto close = spec.rfind(')');
  if (close == std::string::npos || close < open) throw std::invalid_argument("law spec: missing ')' in '" + spec + "'");
  std::vector<std::string> items;
  std::stringstream body(spec.substr(open + 1, close - open - 1));
  bool replaced = false;
  for (std::string item; std::getline(body, item, ',');) {
    const auto first = item.find_first_not_of(' ');
    if (first == std::string::npos) continue;
    item = item.substr(first);
    if (item.rfind(key + "=", 0) == 0 || item.rfind(key + " =", 0) == 0) {
      item = key + "=" + value;
      replaced = true;
    }
    items.push_back(item);
  }
  if (!replaced) items.push_back(key + "=" + value);
  std::string out = spec.substr(0, open) + "(";
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out + ")";
}

std::string ExperimentConfig::effective_law() const {
  std::string s = law;
  if (horizon) s = set_spec_arg(s, "T", fmt(*horizon));
  if (dt) s = set_spec_arg(s, "dt", fmt(*dt));
  return s;
}

void ExperimentConfig::validate() const {
  if (draws < 1) throw std::invalid_argument("config: N must be at least 1");
  Rational::parse(a);
  Rational::parse(b);
  Sampler::parse(effective_law(), seed);
  for (const auto& r : rules) parse_rule(r);
  for (const auto& f : functionals) Functional::parse(f);
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("config: alpha must lie in (0,1)");
  if ((kind == ExperimentKind::Invariance || kind == ExperimentKind::Bound) && rules.empty()) {
    throw std::invalid_argument("config: '" + to_string(kind) + "' needs at least one rule");
  }
  if (kind == ExperimentKind::Ladder || kind == ExperimentKind::Signs || kind == ExperimentKind::Martingale) {
    ladder_levels(Rational::parse(a), Rational::parse(b), 1);  // DyadicRatio on dyadic a/(a+b)
  }
}

bool ExperimentResult::passed() const {
  for (const auto& r : reports) {
    if (!r.passed()) return false;
  }
  return true;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  set_worker_count(cfg.workers);
  const Sampler sampler = Sampler::parse(cfg.effective_law(), cfg.seed);
  ExperimentResult res;
  const Rational a = Rational::parse(cfg.a);
  const Rational b = Rational::parse(cfg.b);
  switch (cfg.kind) {
    case ExperimentKind::Invariance:
      for (const auto& text : cfg.rules) {
        const StoppingRule t = parse_rule(text);
        std::vector<Functional> fs;
        for (const auto& f : cfg.functionals) fs.push_back(Functional::parse(f));
        if (fs.empty()) fs = default_functionals(sampler, t);
        res.reports.push_back(invariance_test(sampler, t, fs, cfg.draws, cfg.seed, cfg.alpha));
      }
      break;
    case ExperimentKind::Bound:
      for (const auto& text : cfg.rules) {
        res.reports.push_back(
            bound_check(sampler, a, b, parse_rule(text), cfg.bound_cap, cfg.draws, cfg.seed, cfg.expected));
      }
      break;
    case ExperimentKind::Ladder:
      res.reports.push_back(ladder_report(cfg, sampler, res.paths));
      break;
    case ExperimentKind::Signs:
      res.reports.push_back(sign_identity_suite(sampler, a, b, cfg.n, cfg.draws, cfg.seed));
      res.reports.push_back(m_of_e_contract(sampler, a, b, std::min<std::size_t>(cfg.n, 4), cfg.min_per_word,
                                            cfg.max_draws, cfg.seed));
      break;
    case ExperimentKind::Suite:
      res.reports.push_back(stability_suite(sampler, cfg.draws, cfg.seed));
      break;
    case ExperimentKind::Lemmas:
      res.reports.push_back(non_dyadic_sweep(cfg.range));
      res.reports.push_back(g_power_exhaustive(cfg.n_max));
      res.reports.push_back(g_bijection_exhaustive(std::min<std::size_t>(cfg.n_max, 10)));
      break;
    case ExperimentKind::Martingale:
      res.reports.push_back(martingale_step_test(sampler, a, b, cfg.n, cfg.draws, cfg.seed));
      break;
  }
  if (cfg.kind != ExperimentKind::Ladder && cfg.kind != ExperimentKind::Lemmas) {
    for (std::size_t i = 0; i < cfg.dump_paths; ++i) {
      const Path p = sampler.sample(i);
      auto& d = res.paths.emplace_back();
      for (std::size_t j = 0; j < p.size(); ++j) d.emplace_back(p.knot_time(j), p.knot_value(j));
    }
  }
  return res;
}

nlohmann::ordered_json result_json(const ExperimentConfig& cfg, const ExperimentResult& res,
                                   const std::string& generated_at) {
  nlohmann::ordered_json j;
  j["generated_at"] = generated_at;
  j["config"] = cfg.to_json();
  auto reports = nlohmann::ordered_json::array();
  for (const auto& r : res.reports) reports.push_back(r.to_json());
  j["reports"] = std::move(reports);
  j["verdict"] = res.passed() ? "pass" : "fail";
  return j;
}

std::string summary_csv(const std::vector<TestReport>& reports) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& r : reports) out += r.csv_row() + "\n";
  return out;
}

void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& res, const std::string& generated_at) {
  std::filesystem::create_directories(cfg.out);
  auto open = [&](const char* name) {
    std::ofstream f(cfg.out / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (cfg.out / name).string());
    return f;
  };
  open("report.json") << result_json(cfg, res, generated_at).dump(2) << "\n";
  open("summary.csv") << summary_csv(res.reports);
  if (!res.paths.empty()) {
    auto f = open("paths.csv");
    f << "path,t,x\n";
    f.precision(17);
    for (std::size_t i = 0; i < res.paths.size(); ++i) {
      for (const auto& [t, x] : res.paths[i]) f << i << "," << t << "," << x << "\n";
    }
  }
}

}  // namespace reflectlab
