#pragma once

#include "reflectlab/report.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace reflectlab {

enum class ExperimentKind { Invariance, Bound, Ladder, Signs, Suite, Lemmas, Martingale };

std::string to_string(ExperimentKind k);
ExperimentKind parse_kind(const std::string& s);

/// One runnable experiment. Exact quantities (a, b) stay strings until use.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Suite;
  std::string law = "bm(dt=1e-3,T=10)";
  std::vector<std::string> rules;
  std::vector<std::string> functionals;  // empty: default battery
  std::string a = "1";
  std::string b = "2";
  std::size_t n = 8;  // ladder steps / word length
  std::uint64_t draws = 1000;
  std::uint64_t seed = 1;
  std::optional<double> horizon;  // replaces T= in the law spec
  std::optional<double> dt;       // replaces dt= in the law spec
  std::filesystem::path out = "out";
  double alpha = 0.001;
  double bound_cap = 100.0;
  std::optional<double> expected;
  std::uint64_t min_per_word = 100;
  std::uint64_t max_draws = 1000000;
  std::int64_t range = 200;  // lemmas: largest c
  std::size_t n_max = 12;    // lemmas: longest word
  std::size_t dump_paths = 0;
  std::size_t workers = 0;

  /// Throws std::invalid_argument on unknown keys or bad values.
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;

  /// Law spec with horizon/dt applied.
  std::string effective_law() const;
  void validate() const;
};

/// Sets `key=value` inside a `name(k=v,...)` spec, adding it if absent.
std::string set_spec_arg(const std::string& spec, const std::string& key, const std::string& value);

struct ExperimentResult {
  std::vector<TestReport> reports;
  /// Optional per-path dump rows (path index, t, x).
  std::vector<std::vector<std::pair<double, double>>> paths;

  bool passed() const;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// report.json body; the timestamp lives under "generated_at" only.
nlohmann::ordered_json result_json(const ExperimentConfig& cfg, const ExperimentResult& res,
                                   const std::string& generated_at);
std::string summary_csv(const std::vector<TestReport>& reports);

/// Writes report.json, summary.csv and, with path dumps, paths.csv.
void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& res, const std::string& generated_at);

}  // namespace reflectlab
