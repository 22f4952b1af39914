#include "reflectlab/report.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace reflectlab {

namespace {

const char* check_name(Check c) {
  switch (c) {
    case Check::AtMost: return "at_most";
    case Check::Above: return "above";
    case Check::Info: return "info";
  }
  return "info";
}

Check check_from(const std::string& s) {
  if (s == "at_most") return Check::AtMost;
  if (s == "above") return Check::Above;
  if (s == "info") return Check::Info;
  throw std::invalid_argument("report: unknown check '" + s + "'");
}

// JSON has no infinities or NaN; keep them as strings.
nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double number_from(const nlohmann::ordered_json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  return NAN;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string shortest(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

bool Statistic::passes() const {
  switch (check) {
    case Check::AtMost: return value <= threshold;
    case Check::Above: return value > threshold;
    case Check::Info: return true;
  }
  return true;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Skipped: return "skipped";
  }
  return "skipped";
}

void TestReport::add_count(std::string name_, std::uint64_t failures, std::string note) {
  Statistic s;
  s.name = std::move(name_);
  s.value = static_cast<double>(failures);
  s.threshold = 0.0;
  s.check = Check::AtMost;
  s.note = std::move(note);
  add(std::move(s));
}

Verdict TestReport::verdict() const {
  bool any = false;
  for (const auto& s : statistics) {
    if (s.check == Check::Info) continue;
    any = true;
    if (!s.passes()) return Verdict::Fail;
  }
  return any ? Verdict::Pass : Verdict::Skipped;
}

nlohmann::ordered_json TestReport::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["params"] = params;
  j["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json(nullptr);
  auto stats = nlohmann::ordered_json::array();
  for (const auto& s : statistics) {
    nlohmann::ordered_json e;
    e["name"] = s.name;
    e["value"] = number(s.value);
    e["threshold"] = number(s.threshold);
    e["check"] = check_name(s.check);
    if (s.standard_error) e["standard_error"] = number(*s.standard_error);
    if (!s.note.empty()) e["note"] = s.note;
    e["pass"] = s.passes();
    stats.push_back(std::move(e));
  }
  j["statistics"] = std::move(stats);
  auto sizes = nlohmann::ordered_json::object();
  for (const auto& [k, v] : sample_sizes) sizes[k] = v;
  j["sample_sizes"] = std::move(sizes);
  if (!notes.empty()) j["notes"] = notes;
  if (!details.empty()) j["details"] = details;
  j["primary"] = primary;
  j["verdict"] = to_string(verdict());
  return j;
}

TestReport TestReport::from_json(const nlohmann::ordered_json& j) {
  TestReport r;
  r.name = j.at("name").get<std::string>();
  r.params = j.at("params");
  if (!j.at("seed").is_null()) r.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& e : j.at("statistics")) {
    Statistic s;
    s.name = e.at("name").get<std::string>();
    s.value = number_from(e.at("value"));
    s.threshold = number_from(e.at("threshold"));
    s.check = check_from(e.at("check").get<std::string>());
    if (e.contains("standard_error")) s.standard_error = number_from(e.at("standard_error"));
    if (e.contains("note")) s.note = e.at("note").get<std::string>();
    r.statistics.push_back(std::move(s));
  }
  for (const auto& [k, v] : j.at("sample_sizes").items()) r.sample_sizes.emplace_back(k, v.get<std::uint64_t>());
  if (j.contains("notes")) r.notes = j.at("notes").get<std::vector<std::string>>();
  if (j.contains("details")) r.details = j.at("details");
  r.primary = j.value("primary", std::size_t{0});
  return r;
}

std::string TestReport::csv_row() const {
  std::string stat = "";
  std::string threshold = "";
  if (primary < statistics.size()) {
    const auto& s = statistics[primary];
    stat = s.name + "=" + shortest(s.value);
    threshold = s.check == Check::Info ? "" : std::string(s.check == Check::AtMost ? "<=" : ">") + shortest(s.threshold);
  }
  return csv_field(name) + "," + csv_field(stat) + "," + csv_field(threshold) + "," + to_string(verdict()) + "," +
         (seed ? std::to_string(*seed) : std::string());
}

}  // namespace reflectlab
