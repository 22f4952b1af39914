#include "reflectlab/samplers.hpp"

#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace reflectlab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::size_t grid_steps(double dt, double horizon) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("sampler: dt must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("sampler: horizon must be positive");
  }
  const double n = std::round(horizon / dt);
  if (n < 1.0 || n > 1e8) throw std::invalid_argument("sampler: horizon/dt out of range");
  return static_cast<std::size_t>(n);
}

double grid_time(std::size_t i, std::size_t n, double horizon) {
  return i == n ? horizon : horizon * static_cast<double>(i) / static_cast<double>(n);
}

/// Replaces everything after the first time |X| reaches `level` by that value.
void freeze_at(std::vector<double>& knots, std::vector<Ticks>& values, Ticks level) {
  for (std::size_t j = 1; j < values.size(); ++j) {
    if (values[j] < level && values[j] > -level) continue;
    const Ticks target = values[j] > 0 ? level : -level;
    if (values[j] != target) {
      const double frac = static_cast<double>(target - values[j - 1]) /
                          static_cast<double>(values[j] - values[j - 1]);
      double t = knots[j - 1] + frac * (knots[j] - knots[j - 1]);
      t = std::clamp(t, std::nextafter(knots[j - 1], knots[j]), std::nextafter(knots[j], knots[j - 1]));
      knots.insert(knots.begin() + static_cast<std::ptrdiff_t>(j), t);
      values.insert(values.begin() + static_cast<std::ptrdiff_t>(j), target);
    }
    for (std::size_t k = j + 1; k < values.size(); ++k) values[k] = target;
    return;
  }
}

/// Sequential generator for the grid-based laws; a prefix of the draw
/// never depends on how far the draw is extended.
class GridStream {
 public:
  GridStream(const Law& law, std::uint64_t seed, std::uint64_t index)
      : law_(law), main_(stream_key(seed, index, 0)), aux_(stream_key(seed, index, 1)) {
    std::visit([this](const auto& l) { init(l); }, law_);
    knots_.push_back(0.0);
    values_.push_back(0);
    clock_.push_back(0.0);
  }

  std::size_t total_steps() const { return n_; }

  void extend_to(std::size_t steps) {
    steps = std::min(steps, n_);
    if (knots_.size() > steps) return;
    knots_.reserve(steps + 1);
    values_.reserve(steps + 1);
    if (std::holds_alternative<BrownianLaw>(law_)) {
      extend_drifted(steps, 0.0);
    } else if (const auto* d = std::get_if<DriftedLaw>(&law_)) {
      extend_drifted(steps, d->drift);
    }
    while (knots_.size() <= steps) next();
  }

  /// The first `steps` grid steps as a Path. With `last` set the buffers are
  /// moved out and the stream must not be used again.
  Path path(std::size_t steps, bool last = false) {
    extend_to(steps);
    std::vector<double> knots;
    std::vector<Ticks> values;
    if (last && steps + 1 == knots_.size()) {
      knots = std::move(knots_);
      values = std::move(values_);
    } else {
      knots.assign(knots_.begin(), knots_.begin() + static_cast<std::ptrdiff_t>(steps + 1));
      values.assign(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(steps + 1));
    }
    if (const auto* s = std::get_if<StoppedSymmetricLaw>(&law_)) freeze_at(knots, values, to_ticks(s->level));
    return Path::from_ticks(std::move(knots), std::move(values));
  }

  double time_of(std::size_t i) const { return grid_time(i, n_, horizon_); }

 private:
  void init(const BrownianLaw& l) { set_grid(l.dt, l.horizon); }
  void init(const DriftedLaw& l) { set_grid(l.dt, l.horizon); }
  void init(const OconeLaw& l) {
    set_grid(l.dt, l.horizon);
    if (l.clock == OconeLaw::Clock::RandomStop) {
      stop_ = std::uniform_real_distribution<double>(0.0, l.horizon)(aux_);
    }
  }
  void init(const StoppedSymmetricLaw& l) {
    if (!(l.level > 0.0)) throw std::invalid_argument("stopped: level must be positive");
    set_grid(l.dt, l.horizon);
    sign_ = (main_() & 1U) ? 1.0 : -1.0;
  }
  void init(const CounterexampleLaw&) { throw std::logic_error("counterexample is not a grid law"); }

  void extend_drifted(std::size_t steps, double drift) {
    double prev_t = knots_.back();
    Ticks prev_v = values_.back();
    for (std::size_t i = knots_.size(); i <= steps; ++i) {
      const double t = time_of(i);
      const double dt = t - prev_t;
      prev_v += to_ticks(std::sqrt(dt) * normal_(main_) + drift * dt);
      knots_.push_back(t);
      values_.push_back(prev_v);
      prev_t = t;
    }
  }

  void set_grid(double dt, double horizon) {
    n_ = grid_steps(dt, horizon);
    horizon_ = horizon;
  }

  double clock_at(double t) {
    const auto& l = std::get<OconeLaw>(law_);
    switch (l.clock) {
      case OconeLaw::Clock::Identity: return t;
      case OconeLaw::Clock::RandomStop: return std::min(t, stop_);
      case OconeLaw::Clock::RandomRate: {
        const auto whole = static_cast<std::size_t>(std::floor(t));
        while (rates_.size() <= whole) rates_.push_back(std::exp(normal_(aux_)));
        double c = 0.0;
        for (std::size_t k = 0; k < whole; ++k) c += rates_[k];
        return c + rates_[whole] * (t - static_cast<double>(whole));
      }
    }
    return t;
  }

  void next() {
    const std::size_t i = knots_.size();
    const double t = time_of(i);
    const double dt = t - knots_.back();
    double inc = 0.0;
    if (std::holds_alternative<BrownianLaw>(law_)) {
      inc = std::sqrt(dt) * normal_(main_);
    } else if (const auto* d = std::get_if<DriftedLaw>(&law_)) {
      inc = std::sqrt(dt) * normal_(main_) + d->drift * dt;
    } else if (std::holds_alternative<OconeLaw>(law_)) {
      const double c = clock_at(t);
      const double var = std::max(0.0, c - clock_.back());
      clock_.push_back(c);
      const double z = normal_(main_);
      inc = var > 0.0 ? std::sqrt(var) * z : 0.0;
    } else if (const auto* s = std::get_if<StoppedSymmetricLaw>(&law_)) {
      if (s->mode == StoppedSymmetricLaw::Mode::Brownian) {
        inc = std::sqrt(dt) * normal_(main_);
      } else {
        knots_.push_back(t);
        values_.push_back(to_ticks(sign_ * t));
        return;
      }
    }
    knots_.push_back(t);
    values_.push_back(values_.back() + to_ticks(inc));
  }

  Law law_;
  std::mt19937_64 main_;
  std::mt19937_64 aux_;
  boost::random::normal_distribution<double> normal_;
  std::size_t n_ = 0;
  double horizon_ = 0.0;
  double stop_ = 0.0;
  double sign_ = 1.0;
  std::vector<double> rates_;
  std::vector<double> clock_;
  std::vector<double> knots_;
  std::vector<Ticks> values_;
};

Path sample_counterexample(const CounterexampleLaw& l, std::uint64_t seed, std::uint64_t index) {
  std::mt19937_64 rng(stream_key(seed, index, 0));
  const std::uint64_t bits = rng();
  const Ticks xi = (bits & 1U) ? to_ticks(1.0) : to_ticks(-1.0);
  const double eta = (bits & 2U) ? 1.0 : -1.0;
  return Path::from_ticks({0.0, 1.0, l.horizon}, {0, xi, xi + to_ticks(eta * (l.horizon - 1.0))});
}

void validate(const Law& law) {
  std::visit(
      [](const auto& l) {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, CounterexampleLaw>) {
          if (!(l.horizon > 1.0) || !std::isfinite(l.horizon)) {
            throw std::invalid_argument("counterexample: horizon must exceed 1");
          }
        } else {
          grid_steps(l.dt, l.horizon);
          if constexpr (std::is_same_v<L, StoppedSymmetricLaw>) {
            if (!(l.level > 0.0)) throw std::invalid_argument("stopped: level must be positive");
          }
          if constexpr (std::is_same_v<L, DriftedLaw>) {
            if (!std::isfinite(l.drift)) throw std::invalid_argument("drift: must be finite");
          }
        }
      },
      law);
}

// --- spec parsing ----------------------------------------------------------

struct Call {
  std::string name;
  std::vector<std::string> positional;
  std::map<std::string, std::string> named;
};

std::string strip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

Call parse_call(std::string_view spec) {
  Call c;
  const std::string s = strip(spec);
  const auto open = s.find('(');
  if (open == std::string::npos) {
    c.name = s;
    return c;
  }
  if (s.back() != ')') throw std::invalid_argument("law spec: missing ')' in '" + s + "'");
  c.name = strip(std::string_view(s).substr(0, open));
  std::string_view body = std::string_view(s).substr(open + 1, s.size() - open - 2);
  while (!strip(body).empty()) {
    const auto comma = body.find(',');
    std::string item = strip(body.substr(0, comma));
    body = comma == std::string_view::npos ? std::string_view{} : body.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      c.positional.push_back(item);
    } else {
      c.named[strip(std::string_view(item).substr(0, eq))] = strip(std::string_view(item).substr(eq + 1));
    }
  }
  return c;
}

double to_number(const std::string& s) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw std::invalid_argument("law spec: bad number '" + s + "'");
  }
}

class Args {
 public:
  explicit Args(Call c) : c_(std::move(c)) {}
  double number(const std::string& key, std::size_t pos, double fallback) {
    if (auto it = c_.named.find(key); it != c_.named.end()) {
      used_.push_back(key);
      return to_number(it->second);
    }
    if (pos < c_.positional.size()) {
      ++positional_used_;
      return to_number(c_.positional[pos]);
    }
    return fallback;
  }
  std::string word(const std::string& key, const std::string& fallback) {
    if (auto it = c_.named.find(key); it != c_.named.end()) {
      used_.push_back(key);
      return it->second;
    }
    return fallback;
  }
  void finish() const {
    for (const auto& [k, v] : c_.named) {
      if (std::find(used_.begin(), used_.end(), k) == used_.end()) {
        throw std::invalid_argument("law spec: unknown key '" + k + "' for " + c_.name);
      }
    }
    if (positional_used_ < c_.positional.size()) {
      throw std::invalid_argument("law spec: too many positional arguments for " + c_.name);
    }
  }

 private:
  Call c_;
  std::vector<std::string> used_;
  std::size_t positional_used_ = 0;
};

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index, std::uint64_t stream) {
  return splitmix64(splitmix64(splitmix64(seed) ^ index) ^ (stream * 0xD1B54A32D192ED03ULL));
}

Sampler::Sampler(Law law, std::uint64_t seed) : law_(std::move(law)), seed_(seed) { validate(law_); }

double Sampler::horizon() const {
  return std::visit([](const auto& l) { return l.horizon; }, law_);
}

Path Sampler::sample(std::uint64_t index) const {
  if (const auto* c = std::get_if<CounterexampleLaw>(&law_)) return sample_counterexample(*c, seed_, index);
  GridStream g(law_, seed_, index);
  return g.path(g.total_steps(), true);
}

Path Sampler::sample_until(std::uint64_t index, const StoppingRule& rule, double block) const {
  if (!(block > 0.0)) throw std::invalid_argument("sample_until: block must be positive");
  if (std::holds_alternative<CounterexampleLaw>(law_)) return sample(index);
  GridStream g(law_, seed_, index);
  const std::size_t n = g.total_steps();
  const double h = horizon();
  const auto per_block = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(block / h * static_cast<double>(n))));
  // Doubling the extension keeps the total work linear in the final length.
  std::size_t grow = per_block;
  for (std::size_t steps = std::min(per_block, n);; steps = std::min(steps + grow, n)) {
    Path p = g.path(steps, steps == n);
    if (steps == n || evaluate(rule, p).observed()) return p;
    grow *= 2;
  }
}

std::string Sampler::describe() const {
  return std::visit(
      [](const auto& l) -> std::string {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, BrownianLaw>) {
          return "bm(dt=" + fmt(l.dt) + ",T=" + fmt(l.horizon) + ")";
        } else if constexpr (std::is_same_v<L, OconeLaw>) {
          const char* c = l.clock == OconeLaw::Clock::Identity    ? "identity"
                          : l.clock == OconeLaw::Clock::RandomRate ? "randrate"
                                                                   : "randstop";
          return std::string("ocone(clock=") + c + ",dt=" + fmt(l.dt) + ",T=" + fmt(l.horizon) + ")";
        } else if constexpr (std::is_same_v<L, CounterexampleLaw>) {
          return "counterexample(T=" + fmt(l.horizon) + ")";
        } else if constexpr (std::is_same_v<L, StoppedSymmetricLaw>) {
          return "stopped(level=" + fmt(l.level) +
                 ",mode=" + (l.mode == StoppedSymmetricLaw::Mode::Ramp ? "ramp" : "bm") +
                 ",dt=" + fmt(l.dt) + ",T=" + fmt(l.horizon) + ")";
        } else {
          return "drift(mu=" + fmt(l.drift) + ",dt=" + fmt(l.dt) + ",T=" + fmt(l.horizon) + ")";
        }
      },
      law_);
}

Sampler Sampler::parse(std::string_view spec, std::uint64_t seed) {
  Call call = parse_call(spec);
  const std::string name = call.name;
  Args args(std::move(call));
  Law law;
  if (name == "bm") {
    BrownianLaw l;
    l.dt = args.number("dt", 0, l.dt);
    l.horizon = args.number("T", 1, l.horizon);
    law = l;
  } else if (name == "ocone") {
    OconeLaw l;
    const std::string clock = args.word("clock", "identity");
    if (clock == "identity") {
      l.clock = OconeLaw::Clock::Identity;
    } else if (clock == "randrate") {
      l.clock = OconeLaw::Clock::RandomRate;
    } else if (clock == "randstop") {
      l.clock = OconeLaw::Clock::RandomStop;
    } else {
      throw std::invalid_argument("law spec: unknown clock '" + clock + "'");
    }
    l.dt = args.number("dt", 99, l.dt);
    l.horizon = args.number("T", 99, l.horizon);
    law = l;
  } else if (name == "counterexample") {
    CounterexampleLaw l;
    l.horizon = args.number("T", 0, l.horizon);
    law = l;
  } else if (name == "stopped") {
    StoppedSymmetricLaw l;
    l.level = args.number("level", 0, l.level);
    const std::string mode = args.word("mode", "bm");
    if (mode == "bm") {
      l.mode = StoppedSymmetricLaw::Mode::Brownian;
    } else if (mode == "ramp") {
      l.mode = StoppedSymmetricLaw::Mode::Ramp;
    } else {
      throw std::invalid_argument("law spec: unknown mode '" + mode + "'");
    }
    l.dt = args.number("dt", 99, l.dt);
    l.horizon = args.number("T", 99, l.horizon);
    law = l;
  } else if (name == "drift") {
    DriftedLaw l;
    l.drift = args.number("mu", 0, l.drift);
    l.dt = args.number("dt", 1, l.dt);
    l.horizon = args.number("T", 2, l.horizon);
    law = l;
  } else {
    throw std::invalid_argument("law spec: unknown law '" + name + "'");
  }
  args.finish();
  return Sampler(std::move(law), seed);
}

}  // namespace reflectlab
