#pragma once

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace reflectlab {

/// How a statistic is compared with its threshold.
enum class Check {
  AtMost,  ///< pass iff value <= threshold
  Above,   ///< pass iff value > threshold
  Info,    ///< recorded only
};

struct Statistic {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  Check check = Check::Info;
  std::optional<double> standard_error;
  std::string note;

  bool passes() const;
};

enum class Verdict { Pass, Fail, Skipped };

std::string to_string(Verdict v);

/// Outcome of one verification. The verdict is a function of the recorded
/// statistics alone: Pass iff every checked statistic passes, Skipped if
/// none is checked.
struct TestReport {
  std::string name;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  std::optional<std::uint64_t> seed;
  std::vector<Statistic> statistics;
  std::vector<std::pair<std::string, std::uint64_t>> sample_sizes;
  std::vector<std::string> notes;
  /// Free-form per-case breakdown; not used by the verdict.
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
  /// Index into statistics of the headline entry for the CSV summary.
  std::size_t primary = 0;

  void add(Statistic s) { statistics.push_back(std::move(s)); }
  /// Adds a check that `failures` is zero.
  void add_count(std::string name, std::uint64_t failures, std::string note = {});

  Verdict verdict() const;
  bool passed() const { return verdict() != Verdict::Fail; }

  nlohmann::ordered_json to_json() const;
  static TestReport from_json(const nlohmann::ordered_json& j);

  /// `test,statistic,threshold,verdict,seed` row (no trailing newline).
  std::string csv_row() const;
};

inline constexpr const char* kCsvHeader = "test,statistic,threshold,verdict,seed";

}  // namespace reflectlab
