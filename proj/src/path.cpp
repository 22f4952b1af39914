#include "reflectlab/path.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace reflectlab {

Ticks to_ticks(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("to_ticks: non-finite value");
  const double scaled = std::ldexp(value, kTickBits);
  if (std::fabs(scaled) >= static_cast<double>(kMaxTicks)) {
    throw std::out_of_range("to_ticks: value outside representable range");
  }
  return static_cast<Ticks>(std::llround(scaled));
}

Ticks to_ticks(const Rational& value) {
  BigInt n = boost::multiprecision::abs(value.num()) << kTickBits;
  BigInt q = n / value.den();
  BigInt r = n % value.den();
  if (2 * r >= value.den()) q += 1;
  if (q >= kMaxTicks) throw std::out_of_range("to_ticks: rational outside representable range");
  Ticks t = q.convert_to<Ticks>();
  return value.sign() < 0 ? -t : t;
}

std::ostream& operator<<(std::ostream& os, StopTime t) {
  if (!t.observed()) return os << "NOT_OBSERVED";
  return os << t.time();
}

bool same_time(StopTime a, StopTime b, double tol) {
  if (a.observed() != b.observed()) return false;
  return !a.observed() || std::fabs(a.time() - b.time()) <= tol;
}

Path::Path(double horizon) : knots_{0.0, horizon}, values_{0, 0} { validate(); }

Path::Path(std::vector<double> knots, std::vector<Ticks> values, bool)
    : knots_(std::move(knots)), values_(std::move(values)) {}

void Path::validate() const {
  if (knots_.size() < 2 || knots_.size() != values_.size()) {
    throw std::invalid_argument("Path: need at least two knots and one value per knot");
  }
  if (knots_.front() != 0.0) throw std::invalid_argument("Path: first knot must be 0");
  if (values_.front() != 0) throw std::invalid_argument("Path: w(0) must be 0");
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!std::isfinite(knots_[i]) || !(knots_[i] > knots_[i - 1])) {
      throw std::invalid_argument("Path: knot times must be finite and strictly increasing");
    }
  }
  for (Ticks v : values_) {
    if (v >= kMaxTicks || v <= -kMaxTicks) throw std::out_of_range("Path: value out of range");
  }
}

Path Path::from_ticks(std::vector<double> knots, std::vector<Ticks> values) {
  Path p(std::move(knots), std::move(values), true);
  p.validate();
  return p;
}

Path Path::from_increments(std::vector<double> knots, std::span<const double> increments) {
  if (increments.size() != knots.size()) {
    throw std::invalid_argument("Path: one increment per knot required");
  }
  if (!increments.empty() && increments[0] != 0.0) {
    throw std::invalid_argument("Path: increments[0] must be 0");
  }
  std::vector<Ticks> values(knots.size(), 0);
  for (std::size_t i = 1; i < knots.size(); ++i) values[i] = values[i - 1] + to_ticks(increments[i]);
  return from_ticks(std::move(knots), std::move(values));
}

Path Path::from_values(std::vector<double> knots, std::span<const double> values) {
  if (values.size() != knots.size()) throw std::invalid_argument("Path: one value per knot required");
  std::vector<Ticks> ticks(values.size());
  std::transform(values.begin(), values.end(), ticks.begin(), [](double v) { return to_ticks(v); });
  return from_ticks(std::move(knots), std::move(ticks));
}

std::vector<double> Path::increments() const {
  std::vector<double> out(values_.size(), 0.0);
  for (std::size_t i = 1; i < values_.size(); ++i) out[i] = ticks_to_double(values_[i] - values_[i - 1]);
  return out;
}

std::size_t Path::segment_of(double t) const {
  if (!(t >= 0.0 && t <= horizon())) throw std::out_of_range("Path: time outside [0, horizon]");
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  std::size_t i = static_cast<std::size_t>(it - knots_.begin());
  // upper_bound gives first knot > t; the segment starts one before.
  return std::min(i - 1, knots_.size() - 2);
}

std::size_t Path::knot_index(double t) const {
  auto it = std::lower_bound(knots_.begin(), knots_.end(), t);
  if (it != knots_.end() && *it == t) return static_cast<std::size_t>(it - knots_.begin());
  return knots_.size();
}

double Path::value_at(double t) const { return value_on_segment(segment_of(t), t); }

double Path::value_on_segment(std::size_t i, double t) const {
  if (t == knots_[i]) return ticks_to_double(values_[i]);
  if (t == knots_[i + 1]) return ticks_to_double(values_[i + 1]);
  const double left = ticks_to_double(values_[i]);
  const double right = ticks_to_double(values_[i + 1]);
  const double frac = (t - knots_[i]) / (knots_[i + 1] - knots_[i]);
  return left + (right - left) * frac;
}

Ticks Path::ticks_at(double t) const {
  const std::size_t i = segment_of(t);
  if (t == knots_[i]) return values_[i];
  if (t == knots_[i + 1]) return values_[i + 1];
  const Ticks lo = std::min(values_[i], values_[i + 1]);
  const Ticks hi = std::max(values_[i], values_[i + 1]);
  return std::clamp(to_ticks(value_at(t)), lo, hi);
}

Path Path::with_knot(double t, Ticks v) const {
  const std::size_t k = knot_index(t);
  if (k < knots_.size()) {
    if (values_[k] != v) throw std::invalid_argument("Path: knot already present with a different value");
    return *this;
  }
  const std::size_t i = segment_of(t);
  const Ticks lo = std::min(values_[i], values_[i + 1]);
  const Ticks hi = std::max(values_[i], values_[i + 1]);
  if (v < lo || v > hi) throw std::invalid_argument("Path: inserted value leaves the segment range");
  std::vector<double> knots;
  std::vector<Ticks> values;
  knots.reserve(knots_.size() + 1);
  values.reserve(values_.size() + 1);
  knots.assign(knots_.begin(), knots_.begin() + static_cast<std::ptrdiff_t>(i + 1));
  values.assign(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(i + 1));
  knots.push_back(t);
  values.push_back(v);
  knots.insert(knots.end(), knots_.begin() + static_cast<std::ptrdiff_t>(i + 1), knots_.end());
  values.insert(values.end(), values_.begin() + static_cast<std::ptrdiff_t>(i + 1), values_.end());
  return Path(std::move(knots), std::move(values), true);
}

Path Path::reflected_after_knot(std::size_t k) const {
  Path out = *this;
  const Ticks pivot2 = 2 * values_[k];
  for (std::size_t j = k + 1; j < values_.size(); ++j) {
    const Ticks v = pivot2 - values_[j];
    if (v >= kMaxTicks || v <= -kMaxTicks) throw std::out_of_range("Path: reflected value out of range");
    out.values_[j] = v;
  }
  return out;
}

Path Path::reflected_at(double t, Ticks v) const {
  const std::size_t k = knot_index(t);
  if (k < knots_.size()) {
    if (values_[k] != v) throw std::invalid_argument("Path: knot already present with a different value");
    return reflected_after_knot(k);
  }
  const std::size_t i = segment_of(t);
  if (v < std::min(values_[i], values_[i + 1]) || v > std::max(values_[i], values_[i + 1])) {
    throw std::invalid_argument("Path: inserted value leaves the segment range");
  }
  std::vector<double> knots;
  std::vector<Ticks> values;
  knots.reserve(knots_.size() + 1);
  values.reserve(values_.size() + 1);
  const auto keep = static_cast<std::ptrdiff_t>(i + 1);
  knots.assign(knots_.begin(), knots_.begin() + keep);
  values.assign(values_.begin(), values_.begin() + keep);
  knots.push_back(t);
  values.push_back(v);
  knots.insert(knots.end(), knots_.begin() + keep, knots_.end());
  const Ticks pivot2 = 2 * v;
  for (std::size_t j = i + 1; j < values_.size(); ++j) {
    const Ticks w = pivot2 - values_[j];
    if (w >= kMaxTicks || w <= -kMaxTicks) throw std::out_of_range("Path: reflected value out of range");
    values.push_back(w);
  }
  return Path(std::move(knots), std::move(values), true);
}

Path Path::truncated(double t) const {
  if (t <= 0.0) throw std::invalid_argument("Path: truncation time must be positive");
  const std::size_t i = segment_of(t);
  const Ticks v = ticks_at(t);
  const auto keep = static_cast<std::ptrdiff_t>(i + 1);
  std::vector<double> knots(knots_.begin(), knots_.begin() + keep);
  std::vector<Ticks> values(values_.begin(), values_.begin() + keep);
  if (knots.back() != t) {
    knots.push_back(t);
    values.push_back(v);
  }
  return Path(std::move(knots), std::move(values), true);
}

Path Path::spliced(double t, const Path& tail) const {
  Path head = truncated(t);
  const Ticks base = head.values_.back();
  head.knots_.reserve(head.size() + tail.size());
  head.values_.reserve(head.size() + tail.size());
  for (std::size_t j = 1; j < tail.size(); ++j) {
    head.knots_.push_back(t + tail.knots_[j]);
    head.values_.push_back(base + tail.values_[j]);
  }
  head.validate();
  return head;
}

bool same_function(const Path& a, const Path& b, double tol) {
  if (a.horizon() != b.horizon()) return false;
  // Both knot lists are sorted, so one forward walk finds every segment.
  auto check = [&](const Path& x, const Path& y) {
    std::size_t j = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double t = x.knot_time(i);
      while (j + 2 < y.size() && y.knot_time(j + 1) <= t) ++j;
      if (std::fabs(x.knot_value(i) - y.value_on_segment(j, t)) > tol) return false;
    }
    return true;
  };
  return check(a, b) && check(b, a);
}

Path insert_knot(const Path& p, double t, double v) {
  const std::size_t k = p.knot_index(t);
  if (k < p.size()) {
    if (to_ticks(v) != p.knot_ticks(k)) {
      throw std::invalid_argument("insert_knot: existing knot holds a different value");
    }
    return p;
  }
  const std::size_t i = p.segment_of(t);
  const double left = p.knot_value(i);
  const double right = p.knot_value(i + 1);
  const double span = std::fabs(right - left);
  const double detour = std::fabs(v - left) + std::fabs(right - v);
  const double scale = std::max({std::fabs(left), std::fabs(right), std::fabs(v), 1.0});
  if (detour - span > 1e-9 * scale) {
    throw std::invalid_argument("insert_knot: value inconsistent with monotone segment");
  }
  const Ticks lo = std::min(p.knot_ticks(i), p.knot_ticks(i + 1));
  const Ticks hi = std::max(p.knot_ticks(i), p.knot_ticks(i + 1));
  return p.with_knot(t, std::clamp(to_ticks(v), lo, hi));
}

Path reflect_at_time(const Path& p, double r) {
  std::size_t k = p.knot_index(r);
  if (k < p.size()) return p.reflected_after_knot(k);
  return p.reflected_at(r, p.ticks_at(r));
}

void write_csv(std::ostream& os, const Path& p) {
  os << "t,x\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < p.size(); ++i) os << p.knot_time(i) << ',' << p.knot_value(i) << '\n';
}

std::string to_csv(const Path& p) {
  std::ostringstream os;
  write_csv(os, p);
  return os.str();
}

Path read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("read_csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,x") throw std::invalid_argument("read_csv: expected header 't,x'");
  std::vector<double> knots;
  std::vector<double> values;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("read_csv: malformed row '" + line + "'");
    try {
      knots.push_back(std::stod(line.substr(0, comma)));
      values.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::logic_error&) {
      throw std::invalid_argument("read_csv: malformed row '" + line + "'");
    }
  }
  return Path::from_values(std::move(knots), values);
}

}  // namespace reflectlab
