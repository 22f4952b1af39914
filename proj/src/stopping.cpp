#include "reflectlab/stopping.hpp"

#include <boost/multiprecision/integer.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace reflectlab {

// ---------------------------------------------------------------------------
// Level ladder

bool in_ladder_domain(const Rational& c, const Rational& a, const Rational& b) {
  if (!(c > -a && c < b)) return false;
  return !((c + a) / (b + a)).is_dyadic();
}

std::int64_t LevelLadder::step_scaled(std::size_t n) const {
  std::int64_t d = c_scaled_.at(n) - c_scaled_.at(n - 1);
  return d < 0 ? -d : d;
}

Ticks LevelLadder::ticks_of_scaled(std::int64_t x) const {
  const __int128 n = static_cast<__int128>(x < 0 ? -x : x) << kTickBits;
  const __int128 k = scale_;
  __int128 q = n / k;
  if (2 * (n % k) >= k) q += 1;
  if (q >= static_cast<__int128>(kMaxTicks)) throw std::out_of_range("ladder level out of tick range");
  const Ticks t = static_cast<Ticks>(q);
  return x < 0 ? -t : t;
}

LevelLadder ladder_levels(const Rational& a, const Rational& b, std::size_t n) {
  if (a.sign() <= 0 || b.sign() <= 0) throw std::invalid_argument("ladder_levels: a and b must be positive");
  if ((a / (a + b)).is_dyadic()) {
    throw DyadicRatio("ladder_levels: a/(a+b) = " + (a / (a + b)).str() + " is dyadic");
  }
  LevelLadder L;
  L.a_ = a;
  L.b_ = b;
  const Rational pivot = (b - a) / Rational(2);
  L.c_.reserve(n + 1);
  L.d_.reserve(n);
  L.c_.emplace_back(0);
  for (std::size_t k = 1; k <= n; ++k) {
    const Rational& prev = L.c_.back();
    // prev == pivot is impossible: (pivot + a)/(a + b) = 1/2 is dyadic.
    if (prev < pivot) {
      L.c_.push_back(Rational(2) * prev + a);
      L.d_.push_back(-a);
    } else {
      L.c_.push_back(Rational(2) * prev - b);
      L.d_.push_back(b);
    }
  }
  const BigInt k = boost::multiprecision::lcm(a.den(), b.den());
  if (k > (BigInt(1) << 40)) throw std::out_of_range("ladder_levels: denominators too large");
  L.scale_ = k.convert_to<std::int64_t>();
  L.c_scaled_.reserve(L.c_.size());
  for (const Rational& c : L.c_) {
    BigInt v = c.num() * (k / c.den());
    if (boost::multiprecision::abs(v) > (BigInt(1) << 50)) {
      throw std::out_of_range("ladder_levels: levels too large");
    }
    L.c_scaled_.push_back(v.convert_to<std::int64_t>());
  }
  return L;
}

// ---------------------------------------------------------------------------
// Rule nodes

struct StoppingRule::Node {
  Kind kind;
  std::string text;
  double fixed_time = 0.0;
  Ticks lo = 0;  // TwoSided lower level; FirstPassage level
  Ticks hi = 0;  // TwoSided upper level
  std::shared_ptr<const LevelLadder> ladder;
  std::size_t step = 0;
  std::vector<StoppingRule> rules;  // Min/Max/Compose: {s, t}; Mixture: branch rules + otherwise
  std::vector<PrefixEvent> events;  // Mixture branch events
};

namespace {

std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::shared_ptr<StoppingRule::Node> make_node(StoppingRule::Kind k, std::string text) {
  auto n = std::make_shared<StoppingRule::Node>();
  n->kind = k;
  n->text = std::move(text);
  return n;
}

}  // namespace

StoppingRule StoppingRule::fixed(double r) {
  if (!std::isfinite(r) || r < 0.0) throw std::invalid_argument("fixed: time must be finite and >= 0");
  auto n = make_node(Kind::Fixed, "fixed(" + fmt_double(r) + ")");
  n->fixed_time = r;
  return StoppingRule(n);
}

StoppingRule StoppingRule::first_passage(double level) {
  auto n = make_node(Kind::FirstPassage, "hit(" + fmt_double(level) + ")");
  n->lo = to_ticks(level);
  return StoppingRule(n);
}

StoppingRule StoppingRule::first_passage(const Rational& level) {
  auto n = make_node(Kind::FirstPassage, "hit(" + level.str() + ")");
  n->lo = to_ticks(level);
  return StoppingRule(n);
}

StoppingRule StoppingRule::two_sided(double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("Tpm: a and b must be positive");
  auto n = make_node(Kind::TwoSided, "Tpm(" + fmt_double(a) + "," + fmt_double(b) + ")");
  n->lo = -to_ticks(a);
  n->hi = to_ticks(b);
  return StoppingRule(n);
}

StoppingRule StoppingRule::two_sided(const Rational& a, const Rational& b) {
  if (a.sign() <= 0 || b.sign() <= 0) throw std::invalid_argument("Tpm: a and b must be positive");
  auto n = make_node(Kind::TwoSided, "Tpm(" + a.str() + "," + b.str() + ")");
  n->lo = -to_ticks(a);
  n->hi = to_ticks(b);
  return StoppingRule(n);
}

StoppingRule StoppingRule::ladder_step(const Rational& a, const Rational& b, std::size_t step) {
  auto n = make_node(Kind::Ladder,
                     "tau(" + a.str() + "," + b.str() + "," + std::to_string(step) + ")");
  n->ladder = std::make_shared<const LevelLadder>(ladder_levels(a, b, step));
  n->step = step;
  return StoppingRule(n);
}

StoppingRule StoppingRule::min(StoppingRule s, StoppingRule t) {
  auto n = make_node(Kind::Min, "min(" + s.describe() + "," + t.describe() + ")");
  n->rules = {std::move(s), std::move(t)};
  return StoppingRule(n);
}

StoppingRule StoppingRule::max(StoppingRule s, StoppingRule t) {
  auto n = make_node(Kind::Max, "max(" + s.describe() + "," + t.describe() + ")");
  n->rules = {std::move(s), std::move(t)};
  return StoppingRule(n);
}

StoppingRule StoppingRule::compose_reflect(StoppingRule s, StoppingRule t) {
  auto n = make_node(Kind::ComposeReflect, "compose(" + s.describe() + "," + t.describe() + ")");
  n->rules = {std::move(s), std::move(t)};
  return StoppingRule(n);
}

StoppingRule StoppingRule::mixture(std::vector<Branch> branches, StoppingRule otherwise) {
  if (branches.empty()) throw std::invalid_argument("mix: at least one branch required");
  // Branch k is selected on A_k minus the earlier A_j: all of those events
  // must be visible at the selected rule's time.
  for (std::size_t k = 0; k < branches.size(); ++k) {
    for (std::size_t j = 0; j <= k; ++j) {
      if (!branches[j].event.measurable_at(branches[k].rule)) {
        throw std::invalid_argument("mix: event " + branches[j].event.describe() +
                                    " is not determined at " + branches[k].rule.describe());
      }
    }
  }
  for (const Branch& br : branches) {
    if (!br.event.measurable_at(otherwise)) {
      throw std::invalid_argument("mix: event " + br.event.describe() +
                                  " is not determined at " + otherwise.describe());
    }
  }
  std::string text = "mix(";
  for (const Branch& br : branches) text += br.event.describe() + "?" + br.rule.describe() + ":";
  text += otherwise.describe() + ")";
  auto n = make_node(Kind::Mixture, std::move(text));
  for (Branch& br : branches) {
    n->events.push_back(std::move(br.event));
    n->rules.push_back(std::move(br.rule));
  }
  n->rules.push_back(std::move(otherwise));
  return StoppingRule(n);
}

StoppingRule::Kind StoppingRule::kind() const { return node_->kind; }
std::string StoppingRule::describe() const { return node_->text; }

bool StoppingRule::dominates(const StoppingRule& other) const {
  const Node& s = *node_;
  const Node& x = other.node();
  if (s.text == x.text) return true;
  if (x.kind == Kind::Fixed && x.fixed_time == 0.0) return true;
  if (x.kind == Kind::FirstPassage && x.lo == 0) return true;
  if (s.kind == Kind::Fixed && x.kind == Kind::Fixed) return s.fixed_time >= x.fixed_time;
  if (s.kind == Kind::Ladder && x.kind == Kind::Ladder) {
    return s.ladder->a() == x.ladder->a() && s.ladder->b() == x.ladder->b() && s.step >= x.step;
  }
  if (s.kind == Kind::Max && (s.rules[0].dominates(other) || s.rules[1].dominates(other))) return true;
  if (x.kind == Kind::Min && (dominates(x.rules[0]) || dominates(x.rules[1]))) return true;
  if (x.kind == Kind::Max && dominates(x.rules[0]) && dominates(x.rules[1])) return true;
  if (s.kind == Kind::Min && s.rules[0].dominates(other) && s.rules[1].dominates(other)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Events

PrefixEvent PrefixEvent::order(StoppingRule u, StoppingRule v) {
  return PrefixEvent(Kind::Order, std::move(u), std::move(v), 0);
}

PrefixEvent PrefixEvent::sign_at(StoppingRule u, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign_at: sign must be +1 or -1");
  StoppingRule v = u;
  return PrefixEvent(Kind::Sign, std::move(u), std::move(v), sign);
}

PrefixEvent PrefixEvent::observed(StoppingRule u) {
  StoppingRule v = u;
  return PrefixEvent(Kind::Observed, std::move(u), std::move(v), 0);
}

std::string PrefixEvent::describe() const {
  switch (kind_) {
    case Kind::Order: return "le(" + u_.describe() + "," + v_.describe() + ")";
    case Kind::Sign: return (sign_ > 0 ? "pos(" : "neg(") + u_.describe() + ")";
    case Kind::Observed: return "seen(" + u_.describe() + ")";
  }
  return {};
}

bool PrefixEvent::holds(const Path& p) const {
  switch (kind_) {
    case Kind::Order: return !(evaluate(u_, p) > evaluate(v_, p));
    case Kind::Sign: {
      Hit h = evaluate_hit(u_, p);
      if (!h.time.observed()) return false;
      return sign_ > 0 ? h.value > 0 : h.value < 0;
    }
    case Kind::Observed: return evaluate(u_, p).observed();
  }
  return false;
}

bool PrefixEvent::measurable_at(const StoppingRule& s) const {
  switch (kind_) {
    // {U <= V} is in F_{U ^ V}.
    case Kind::Order: return s.dominates(u_) || s.dominates(v_);
    case Kind::Sign:
    case Kind::Observed: return s.dominates(u_);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

struct Crossing {
  bool found = false;
  double time = 0.0;
  Ticks level = 0;
  std::size_t segment = 0;
};

/// Time at which segment j of p attains `level`, using the segment's own
/// endpoints so every rule computes the same time for the same crossing.
double crossing_time(const Path& p, std::size_t j, Ticks level, double lower) {
  const double t0 = p.knot_time(j);
  const double t1 = p.knot_time(j + 1);
  if (p.knot_ticks(j + 1) == level) return t1;
  const double frac = static_cast<double>(level - p.knot_ticks(j)) /
                      static_cast<double>(p.knot_ticks(j + 1) - p.knot_ticks(j));
  double t = t0 + frac * (t1 - t0);
  // Strictly inside (lower, t1): the level lies strictly between the values.
  if (t >= t1) t = std::nextafter(t1, t0);
  if (t <= lower) t = std::nextafter(lower, t1);
  return t;
}

/// First time after (segment, start) the path reaches lo or hi, given the
/// path value at the start lies strictly between them.
Crossing scan(const Path& p, std::size_t segment, double start, Ticks lo, Ticks hi) {
  const auto values = p.values();
  for (std::size_t j = segment; j + 1 < p.size(); ++j) {
    const Ticks right = values[j + 1];
    Ticks target;
    if (right >= hi) {
      target = hi;
    } else if (right <= lo) {
      target = lo;
    } else {
      continue;
    }
    const double lower = j == segment ? std::max(start, p.knot_time(j)) : p.knot_time(j);
    Crossing c;
    c.found = true;
    c.level = target;
    c.segment = j;
    c.time = crossing_time(p, j, target, lower);
    return c;
  }
  return {};
}

constexpr Ticks kNoLevel = std::numeric_limits<Ticks>::max();

Hit first_passage_hit(const Path& p, Ticks level) {
  if (level == 0) return {StopTime(0.0), 0};
  Crossing c = level > 0 ? scan(p, 0, 0.0, -kNoLevel, level) : scan(p, 0, 0.0, level, kNoLevel);
  if (!c.found) return {};
  return {StopTime(c.time), c.level};
}

Hit two_sided_hit(const Path& p, Ticks lo, Ticks hi) {
  if (lo >= 0 || hi <= 0) return {StopTime(0.0), 0};
  Crossing c = scan(p, 0, 0.0, lo, hi);
  if (!c.found) return {};
  return {StopTime(c.time), c.level};
}

}  // namespace

LadderTrace trace_ladder(const LevelLadder& ladder, const Path& p, std::size_t n_max) {
  if (n_max > ladder.steps()) throw std::invalid_argument("trace_ladder: ladder too short");
  LadderTrace tr;
  tr.times.reserve(n_max + 1);
  tr.signs.reserve(n_max);
  tr.times.emplace_back(0.0);
  tr.anchors_scaled.push_back(0);
  tr.segments.push_back(0);
  std::int64_t anchor = 0;
  std::size_t segment = 0;
  double t = 0.0;
  bool alive = true;
  for (std::size_t n = 1; n <= n_max; ++n) {
    if (!alive) {
      tr.times.push_back(StopTime::never());
      tr.signs.push_back(0);
      continue;
    }
    const std::int64_t step = ladder.step_scaled(n);
    const Ticks lo = ladder.ticks_of_scaled(anchor - step);
    const Ticks hi = ladder.ticks_of_scaled(anchor + step);
    Crossing c = scan(p, segment, t, lo, hi);
    if (!c.found) {
      alive = false;
      tr.times.push_back(StopTime::never());
      tr.signs.push_back(0);
      continue;
    }
    const int moved = c.level == hi ? 1 : -1;
    anchor += moved * step;
    segment = c.segment;
    t = c.time;
    tr.times.emplace_back(t);
    tr.signs.push_back(moved * ladder.direction(n));
    tr.anchors_scaled.push_back(anchor);
    tr.segments.push_back(segment);
  }
  return tr;
}

Hit evaluate_hit(const StoppingRule& rule, const Path& p) {
  const StoppingRule::Node& n = rule.node();
  using K = StoppingRule::Kind;
  switch (n.kind) {
    case K::Fixed:
      if (n.fixed_time > p.horizon()) return {};
      return {StopTime(n.fixed_time), p.ticks_at(n.fixed_time)};
    case K::FirstPassage: return first_passage_hit(p, n.lo);
    case K::TwoSided: return two_sided_hit(p, n.lo, n.hi);
    case K::Ladder: {
      LadderTrace tr = trace_ladder(*n.ladder, p, n.step);
      if (!tr.times.back().observed()) return {};
      return {tr.times.back(), n.ladder->ticks_of_scaled(tr.anchors_scaled.back())};
    }
    case K::Min: {
      Hit s = evaluate_hit(n.rules[0], p);
      Hit t = evaluate_hit(n.rules[1], p);
      return t.time < s.time ? t : s;
    }
    case K::Max: {
      Hit s = evaluate_hit(n.rules[0], p);
      Hit t = evaluate_hit(n.rules[1], p);
      return t.time > s.time ? t : s;
    }
    case K::Mixture: {
      for (std::size_t k = 0; k < n.events.size(); ++k) {
        if (n.events[k].holds(p)) return evaluate_hit(n.rules[k], p);
      }
      return evaluate_hit(n.rules.back(), p);
    }
    case K::ComposeReflect: {
      Hit t = evaluate_hit(n.rules[1], p);
      if (!t.time.observed()) return evaluate_hit(n.rules[0], p);
      Hit s = evaluate_hit(n.rules[0], reflect_at_hit(p, t));
      if (!s.time.observed()) return s;
      // Translate the value seen on rho_T(p) back to p.
      if (s.time > t.time) s.value = 2 * t.value - s.value;
      return s;
    }
  }
  return {};
}

StopTime evaluate(const StoppingRule& rule, const Path& p) { return evaluate_hit(rule, p).time; }

Path reflect_at_hit(const Path& p, const Hit& hit) {
  if (!hit.time.observed()) return p;
  return p.reflected_at(hit.time.time(), hit.value);
}

Path reflect_at_rule(const Path& p, const StoppingRule& rule) {
  return reflect_at_hit(p, evaluate_hit(rule, p));
}

LadderTimes ladder_times(const Rational& a, const Rational& b, const Path& p, std::size_t n_max) {
  const LevelLadder ladder = ladder_levels(a, b, n_max);
  LadderTrace tr = trace_ladder(ladder, p, n_max);
  Path annotated = p;
  for (std::size_t k = 1; k < tr.anchors_scaled.size(); ++k) {
    annotated = annotated.with_knot(tr.times[k].time(), ladder.ticks_of_scaled(tr.anchors_scaled[k]));
  }
  return {std::move(tr.times), std::move(annotated)};
}

std::vector<MartingaleStep> discrete_martingale_track(const Rational& a, const Rational& b,
                                                      const Path& p, std::size_t n_max) {
  const LevelLadder ladder = ladder_levels(a, b, n_max);
  const LadderTrace tr = trace_ladder(ladder, p, n_max);
  std::vector<MartingaleStep> out;
  out.reserve(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) {
    const std::size_t d = std::min(n, tr.anchors_scaled.size() - 1);
    Rational y(BigInt(tr.anchors_scaled[d]), BigInt(ladder.scale()));
    const double v = y.to_double();
    out.push_back({std::move(y), v, d});
  }
  return out;
}

}  // namespace reflectlab
