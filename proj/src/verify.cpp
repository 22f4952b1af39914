#include "reflectlab/verify.hpp"

#include "reflectlab/grammar.hpp"
#include "reflectlab/ks.hpp"
#include "reflectlab/parallel.hpp"
#include "reflectlab/sign_dynamics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

namespace reflectlab {

namespace {

constexpr double kTimeTol = 1e-9;

std::string num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

Statistic info(std::string name, double value, std::string note = {}) {
  Statistic s;
  s.name = std::move(name);
  s.value = value;
  s.note = std::move(note);
  return s;
}

/// -1, 0, +1 for a < b, a ~ b, a > b, with NOT_OBSERVED last.
int compare_times(StopTime a, StopTime b) {
  if (same_time(a, b, kTimeTol)) return 0;
  return a < b ? -1 : 1;
}

/// p with a knot at the hit (if observed and missing).
Path annotate(const Path& p, const Hit& h) {
  if (!h.time.observed() || p.knot_index(h.time.time()) < p.size()) return p;
  return p.with_knot(h.time.time(), h.value);
}

/// p up to the hit, then at most one time unit of the increments of
/// `other`; the two paths agree on [0, hit].
std::optional<Path> splice_after(const Path& p, const Hit& h, const Path& other) {
  if (!h.time.observed()) return std::nullopt;
  const double t = h.time.time();
  const double rest = std::min(1.0, p.horizon() - t);
  if (!(rest > 0.0) || rest > other.horizon()) return std::nullopt;
  const double end = t + rest;
  if (!(end > t)) return std::nullopt;
  // Head: p on [0, t] ending exactly at the hit value.
  const std::size_t i = p.segment_of(t);
  const std::size_t keep = p.knot_time(i) == t ? i : i + 1;
  const std::size_t tail = other.segment_of(rest) + 2;
  std::vector<double> knots;
  std::vector<Ticks> values;
  knots.reserve(keep + tail + 1);
  values.reserve(keep + tail + 1);
  knots.assign(p.knots().begin(), p.knots().begin() + static_cast<std::ptrdiff_t>(keep));
  values.assign(p.values().begin(), p.values().begin() + static_cast<std::ptrdiff_t>(keep));
  knots.push_back(t);
  values.push_back(h.value);
  for (std::size_t j = 1; j < other.size() && t + other.knot_time(j) < end; ++j) {
    knots.push_back(t + other.knot_time(j));
    values.push_back(h.value + other.knot_ticks(j));
  }
  knots.push_back(end);
  values.push_back(h.value + other.ticks_at(rest));
  return Path::from_ticks(std::move(knots), std::move(values));
}

std::uint64_t bump(bool failed) { return failed ? 1 : 0; }

}  // namespace

// ---------------------------------------------------------------------------
// Exact lemmas

bool check_non_dyadic_triple(const Rational& a, const Rational& b, const Rational& c) {
  if (!(Rational(0) < a && a < b && b < c)) throw std::invalid_argument("non-dyadic triple: need c > b > a > 0");
  return !(a / (a + b)).is_dyadic() || !(b / (b + c)).is_dyadic() || !(a / (a + c)).is_dyadic();
}

TestReport non_dyadic_sweep(std::int64_t max_c) {
  if (max_c < 3) throw std::invalid_argument("non_dyadic_sweep: range must be at least 3");
  struct Acc {
    std::uint64_t checked = 0;
    std::uint64_t failures = 0;
    std::string first_failure;
  };
  const auto cs = static_cast<std::uint64_t>(max_c - 2);
  Acc acc = parallel_reduce(
      cs, Acc{},
      [&](Acc& a, std::uint64_t i) {
        const std::int64_t c = static_cast<std::int64_t>(i) + 3;
        for (std::int64_t y = 2; y < c; ++y) {
          for (std::int64_t x = 1; x < y; ++x) {
            ++a.checked;
            if (!check_non_dyadic_triple(Rational(x), Rational(y), Rational(c))) {
              if (a.failures++ == 0) a.first_failure = std::to_string(x) + "," + std::to_string(y) + "," + std::to_string(c);
            }
          }
        }
      },
      [](Acc& into, const Acc& from) {
        into.checked += from.checked;
        if (into.failures == 0 && from.failures > 0) into.first_failure = from.first_failure;
        into.failures += from.failures;
      });
  TestReport r;
  r.name = "non_dyadic_sweep";
  r.params["max_c"] = max_c;
  r.add_count("triples_without_non_dyadic_ratio", acc.failures, acc.first_failure);
  r.add(info("triples_checked", static_cast<double>(acc.checked)));
  r.sample_sizes.emplace_back("triples", acc.checked);
  return r;
}

TestReport g_power_exhaustive(std::size_t n_max) {
  if (n_max < 1 || n_max > 24) throw std::invalid_argument("g_power_exhaustive: n_max must be in [1, 24]");
  const std::vector<SignWord> suffixes{SignWord::parse("+-"), SignWord::parse("-+")};
  std::uint64_t checked = 0;
  std::uint64_t first_bad = 0;
  std::uint64_t second_bad = 0;
  std::string example;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const std::uint64_t count = std::uint64_t{1} << n;
    const std::uint64_t half = count / 2;
    for (const SignWord& sigma : suffixes) {
      // First form: iterate g from (1_n, sigma).
      SignWord w = SignWord::ones(n).concat(sigma);
      std::vector<SignWord> formula(count);
      for (std::uint64_t N = 0; N < count; ++N) {
        formula[N] = g_power_formula(n, N, sigma);
        ++checked;
        if (w != formula[N]) {
          if (first_bad++ == 0) example = "n=" + std::to_string(n) + " N=" + std::to_string(N) + " sigma=" + sigma.str();
        }
        w = map_g(w);
      }
      // Second form: g^{N - 2^{n-1}} applied to (1_{n-1}, -1, sigma).
      const SignWord base = SignWord::ones(n - 1).concat(SignWord({-1})).concat(sigma);
      SignWord up = base;
      for (std::uint64_t N = half; N < count; ++N) {
        if (up != formula[N]) ++second_bad;
        up = map_g(up);
      }
      SignWord down = base;
      for (std::uint64_t N = half; N-- > 0;) {
        down = map_g_inverse(down);
        if (down != formula[N]) ++second_bad;
      }
    }
  }
  TestReport r;
  r.name = "g_power_exhaustive";
  r.params["n_max"] = n_max;
  r.params["suffixes"] = {"+-", "-+"};
  r.add_count("binary_digit_form_mismatches", first_bad, example);
  r.add_count("shifted_form_mismatches", second_bad);
  r.add(info("exponents_checked", static_cast<double>(checked)));
  r.sample_sizes.emplace_back("words", checked);
  return r;
}

TestReport g_bijection_exhaustive(std::size_t n_max) {
  if (n_max > 14) throw std::invalid_argument("g_bijection_exhaustive: n_max must be <= 14");
  std::uint64_t checked = 0;
  std::uint64_t not_inverse = 0;
  std::uint64_t not_injective = 0;
  std::uint64_t r_not_involution = 0;
  for (std::size_t n = 0; n <= n_max; ++n) {
    const std::vector<SignWord> words = enumerate_words(n);
    std::vector<SignWord> images;
    images.reserve(words.size());
    for (const SignWord& e : words) {
      const SignWord ge = map_g(e);
      not_inverse += bump(map_g_inverse(ge) != e || map_g(map_g_inverse(e)) != e);
      r_not_involution += bump(map_r(map_r(e)) != e);
      images.push_back(ge);
      ++checked;
    }
    std::sort(images.begin(), images.end());
    not_injective += bump(images != words);
  }
  TestReport r;
  r.name = "g_bijection_exhaustive";
  r.params["n_max"] = n_max;
  r.add_count("inverse_failures", not_inverse);
  r.add_count("lengths_where_g_is_not_onto", not_injective);
  r.add_count("r_involution_failures", r_not_involution);
  r.sample_sizes.emplace_back("words", checked);
  return r;
}

// ---------------------------------------------------------------------------
// Functionals

Functional Functional::value_at(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("value(t): t must be finite and >= 0");
  return Functional(Kind::ValueAt, t, std::nullopt);
}
Functional Functional::running_max() { return Functional(Kind::RunningMax, 0.0, std::nullopt); }
Functional Functional::hitting_time(double level) {
  if (!std::isfinite(level)) throw std::invalid_argument("hit(level): level must be finite");
  return Functional(Kind::HittingTime, level, StoppingRule::first_passage(level));
}
Functional Functional::value_at_rule(StoppingRule s) { return Functional(Kind::ValueAtRule, 0.0, std::move(s)); }

Functional Functional::parse(std::string_view text) {
  auto inner = [&](std::string_view head) -> std::optional<std::string_view> {
    if (text.size() > head.size() + 1 && text.substr(0, head.size()) == head && text[head.size()] == '(' &&
        text.back() == ')') {
      return text.substr(head.size() + 1, text.size() - head.size() - 2);
    }
    return std::nullopt;
  };
  auto number = [&](std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw std::invalid_argument("functional: bad number in '" + std::string(text) + "'");
    }
    return v;
  };
  if (text == "max") return running_max();
  if (auto a = inner("value")) return value_at(number(*a));
  if (auto a = inner("hit")) return hitting_time(number(*a));
  if (auto a = inner("at")) return value_at_rule(parse_rule(*a));
  throw std::invalid_argument("functional: unknown '" + std::string(text) + "'");
}

std::string Functional::describe() const {
  switch (kind_) {
    case Kind::ValueAt: return "value(" + num(x_) + ")";
    case Kind::RunningMax: return "max";
    case Kind::HittingTime: return "hit(" + num(x_) + ")";
    case Kind::ValueAtRule: return "at(" + rule_->describe() + ")";
  }
  return {};
}

double Functional::operator()(const Path& p) const {
  switch (kind_) {
    case Kind::ValueAt: return p.value_at(x_);
    case Kind::RunningMax: {
      const auto v = p.values();
      return ticks_to_double(*std::max_element(v.begin(), v.end()));
    }
    case Kind::HittingTime: return evaluate(*rule_, p).value_or(p.horizon() + 1.0);
    case Kind::ValueAtRule: {
      const Hit h = evaluate_hit(*rule_, p);
      return h.time.observed() ? ticks_to_double(h.value) : p.value_at(p.horizon());
    }
  }
  return 0.0;
}

std::vector<Functional> default_functionals(const Sampler& s, const StoppingRule& t) {
  std::vector<Functional> out;
  if (s.horizon() > 1.0) out.push_back(Functional::value_at(1.0));
  out.push_back(Functional::value_at(s.horizon()));
  out.push_back(Functional::running_max());
  out.push_back(Functional::hitting_time(1.0));
  out.push_back(Functional::value_at_rule(t));
  return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo checks

TestReport invariance_test(const Sampler& s, const StoppingRule& t, const std::vector<Functional>& functionals,
                           std::uint64_t n, std::uint64_t seed, double alpha) {
  if (n < 1000) throw std::invalid_argument("invariance_test: N must be at least 1000");
  if (functionals.empty()) throw std::invalid_argument("invariance_test: no functionals");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("invariance_test: alpha must be in (0, 1)");
  const Sampler sampler = s.with_seed(seed);
  const std::size_t k = functionals.size();
  using Columns = std::vector<std::vector<double>>;
  struct Acc {
    Columns plain;
    Columns reflected;
  };
  const Acc empty{Columns(k), Columns(k)};
  Acc acc = parallel_reduce(
      2 * n, empty,
      [&](Acc& a, std::uint64_t i) {
        const Path p = sampler.sample(i);
        if (i < n) {
          for (std::size_t f = 0; f < k; ++f) a.plain[f].push_back(functionals[f](p));
        } else {
          const Path q = reflect_at_rule(p, t);
          for (std::size_t f = 0; f < k; ++f) a.reflected[f].push_back(functionals[f](q));
        }
      },
      [&](Acc& into, const Acc& from) {
        for (std::size_t f = 0; f < k; ++f) {
          into.plain[f].insert(into.plain[f].end(), from.plain[f].begin(), from.plain[f].end());
          into.reflected[f].insert(into.reflected[f].end(), from.reflected[f].begin(), from.reflected[f].end());
        }
      });

  TestReport r;
  r.name = "invariance_test";
  r.seed = seed;
  r.params["law"] = s.describe();
  r.params["rule"] = t.describe();
  r.params["alpha"] = alpha;
  r.params["design"] = "independent arms";
  auto names = nlohmann::ordered_json::array();
  for (const auto& f : functionals) names.push_back(f.describe());
  r.params["functionals"] = names;
  r.sample_sizes.emplace_back("plain", n);
  r.sample_sizes.emplace_back("reflected", n);

  std::vector<std::optional<KsResult>> results(k);
  std::size_t active = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const auto& x = acc.plain[f];
    const auto& y = acc.reflected[f];
    const double v = x.front();
    const bool constant = std::all_of(x.begin(), x.end(), [v](double z) { return z == v; }) &&
                          std::all_of(y.begin(), y.end(), [v](double z) { return z == v; });
    if (constant) continue;
    results[f] = ks_two_sample(x, y);
    ++active;
  }
  double min_adjusted = 1.0;
  std::vector<Statistic> per;
  for (std::size_t f = 0; f < k; ++f) {
    const std::string label = "adjusted_p[" + functionals[f].describe() + "]";
    if (!results[f]) {
      per.push_back(info(label, 1.0, "skipped: constant on both arms"));
      continue;
    }
    Statistic st;
    st.name = label;
    st.value = std::min(1.0, results[f]->p_value * static_cast<double>(active));
    st.threshold = alpha;
    st.check = Check::Above;
    st.note = "D=" + num(results[f]->statistic) + " p=" + num(results[f]->p_value);
    min_adjusted = std::min(min_adjusted, st.value);
    per.push_back(std::move(st));
  }
  if (active > 0) {
    Statistic m;
    m.name = "min_adjusted_p";
    m.value = min_adjusted;
    m.threshold = alpha;
    m.check = Check::Above;
    m.note = "Bonferroni over " + std::to_string(active) + " functionals";
    r.add(std::move(m));
  } else {
    r.notes.push_back("every functional was constant; nothing to test");
  }
  for (auto& st : per) r.add(std::move(st));
  return r;
}

TestReport bound_check(const Sampler& s, const Rational& a, const Rational& b, const StoppingRule& stop,
                       double bound_cap, std::uint64_t n, std::uint64_t seed, std::optional<double> expected) {
  if (n < 2) throw std::invalid_argument("bound_check: N must be at least 2");
  if (a.sign() <= 0 || b.sign() <= 0) throw std::invalid_argument("bound_check: a and b must be positive");
  if (!(bound_cap > 0.0)) throw std::invalid_argument("bound_check: bound_cap must be positive");
  const Sampler sampler = s.with_seed(seed);
  const Ticks cap = to_ticks(bound_cap);
  struct Acc {
    double sum = 0.0;
    double sumsq = 0.0;
    double sup = 0.0;
  };
  Acc acc = parallel_reduce(
      n, Acc{},
      [&](Acc& acc_, std::uint64_t i) {
        const Path p = sampler.sample_until(i, stop);
        const Hit h = evaluate_hit(stop, p);
        if (!h.time.observed()) {
          throw HypothesisError("bound_check: " + stop.describe() + " not observed within the horizon on draw " +
                                std::to_string(i));
        }
        Ticks sup = h.value < 0 ? -h.value : h.value;
        for (std::size_t j = 0; j < p.size() && p.knot_time(j) <= h.time.time(); ++j) {
          sup = std::max(sup, p.knot_ticks(j) < 0 ? -p.knot_ticks(j) : p.knot_ticks(j));
        }
        if (sup > cap) {
          throw HypothesisError("bound_check: |X| reached " + num(ticks_to_double(sup)) + " > bound_cap before " +
                                stop.describe() + " on draw " + std::to_string(i));
        }
        const double x = ticks_to_double(h.value);
        acc_.sum += x;
        acc_.sumsq += x * x;
        acc_.sup = std::max(acc_.sup, ticks_to_double(sup));
      },
      [](Acc& into, const Acc& from) {
        into.sum += from.sum;
        into.sumsq += from.sumsq;
        into.sup = std::max(into.sup, from.sup);
      });
  const double nn = static_cast<double>(n);
  const double mean = acc.sum / nn;
  const double var = std::max(0.0, (acc.sumsq / nn - mean * mean) * nn / (nn - 1.0));
  const double se = std::sqrt(var / nn);
  const double ab = (a + b).to_double();

  TestReport r;
  r.name = "bound_check";
  r.seed = seed;
  r.params["law"] = s.describe();
  r.params["a"] = a.str();
  r.params["b"] = b.str();
  r.params["rule"] = stop.describe();
  r.params["bound_cap"] = bound_cap;
  if (expected) r.params["expected"] = *expected;
  r.sample_sizes.emplace_back("draws", n);

  Statistic bound;
  bound.name = "abs_mean_minus_4se";
  bound.value = std::fabs(mean) - 4.0 * se;
  bound.threshold = ab;
  bound.check = Check::AtMost;
  bound.note = "a+b";
  r.add(std::move(bound));
  if (expected) {
    Statistic z;
    z.name = "abs_mean_minus_expected_over_se";
    const double dev = std::fabs(mean - *expected);
    z.value = se > 0.0 ? dev / se : (dev == 0.0 ? 0.0 : INFINITY);
    z.threshold = 4.0;
    z.check = Check::AtMost;
    r.add(std::move(z));
    r.primary = 1;
  }
  Statistic m = info("mean", mean);
  m.standard_error = se;
  r.add(std::move(m));
  r.add(info("max_abs_before_stop", acc.sup));
  if ((a / (a + b)).is_dyadic()) {
    r.notes.push_back("a/(a+b) = " + (a / (a + b)).str() +
                      " is dyadic: the reflection-invariance hypothesis of the bound is not met");
  }
  return r;
}

TestReport martingale_step_test(const Sampler& s, const Rational& a, const Rational& b, std::size_t n_max,
                                std::uint64_t n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("martingale_step_test: N must be at least 2");
  if (n_max > 12) throw std::invalid_argument("martingale_step_test: n_max must be <= 12");
  const LevelLadder ladder = ladder_levels(a, b, n_max + 1);
  const StoppingRule last = StoppingRule::ladder_step(a, b, n_max + 1);
  const Sampler sampler = s.with_seed(seed);
  const std::size_t events = (std::size_t{2} << n_max) - 1;
  struct Acc {
    std::vector<std::int64_t> sum;
    std::vector<std::int64_t> sumsq;
    std::vector<std::uint64_t> hits;
    std::uint64_t antisymmetry_failures = 0;
    std::uint64_t antisymmetry_checks = 0;
    std::uint64_t incomplete = 0;
  };
  const Acc empty{std::vector<std::int64_t>(events), std::vector<std::int64_t>(events),
                  std::vector<std::uint64_t>(events)};
  Acc acc = parallel_reduce(
      n, empty,
      [&](Acc& acc_, std::uint64_t i) {
        const Path p = sampler.sample_until(i, last);
        const LadderTrace tr = trace_ladder(ladder, p, n_max + 1);
        const std::size_t seen = tr.anchors_scaled.size();  // tau_0..tau_{seen-1} observed
        if (seen <= n_max + 1) ++acc_.incomplete;
        auto delta = [](const LadderTrace& t, std::size_t k) -> std::int64_t {
          return k + 1 < t.anchors_scaled.size() ? t.anchors_scaled[k + 1] - t.anchors_scaled[k] : 0;
        };
        std::size_t word = 0;  // bit j set when epsilon_{j+1} = -1
        for (std::size_t k = 0; k <= n_max; ++k) {
          if (k > 0) {
            if (tr.signs[k - 1] == 0) break;  // A lies in {epsilon_k != 0}
            if (tr.signs[k - 1] < 0) word |= std::size_t{1} << (k - 1);
          }
          const std::size_t idx = (std::size_t{1} << k) - 1 + word;
          const std::int64_t d = delta(tr, k);
          acc_.sum[idx] += d;
          acc_.sumsq[idx] += d * d;
          ++acc_.hits[idx];
        }
        for (std::size_t k = 0; k <= n_max && k < seen; ++k) {
          const Hit h{tr.times[k], ladder.ticks_of_scaled(tr.anchors_scaled[k])};
          const LadderTrace tq = trace_ladder(ladder, reflect_at_hit(p, h), k + 1);
          ++acc_.antisymmetry_checks;
          const bool same_anchor = tq.anchors_scaled.size() > k && tq.anchors_scaled[k] == tr.anchors_scaled[k];
          if (!same_anchor || delta(tq, k) != -delta(tr, k)) ++acc_.antisymmetry_failures;
        }
      },
      [&](Acc& into, const Acc& from) {
        for (std::size_t e = 0; e < events; ++e) {
          into.sum[e] += from.sum[e];
          into.sumsq[e] += from.sumsq[e];
          into.hits[e] += from.hits[e];
        }
        into.antisymmetry_failures += from.antisymmetry_failures;
        into.antisymmetry_checks += from.antisymmetry_checks;
        into.incomplete += from.incomplete;
      });

  TestReport r;
  r.name = "martingale_step_test";
  r.seed = seed;
  r.params["law"] = s.describe();
  r.params["a"] = a.str();
  r.params["b"] = b.str();
  r.params["n_max"] = n_max;
  r.sample_sizes.emplace_back("draws", n);
  r.add_count("antisymmetry_failures", acc.antisymmetry_failures,
              std::to_string(acc.antisymmetry_checks) + " reflected ladders compared");

  const double nn = static_cast<double>(n);
  const double scale = static_cast<double>(ladder.scale());
  double worst = 0.0;
  std::vector<Statistic> per;
  for (std::size_t k = 0; k <= n_max; ++k) {
    for (std::size_t w = 0; w < (std::size_t{1} << k); ++w) {
      const std::size_t idx = (std::size_t{1} << k) - 1 + w;
      std::string e;
      for (std::size_t j = 0; j < k; ++j) e += (w >> j) & 1U ? '-' : '+';
      const double mean = static_cast<double>(acc.sum[idx]) / scale / nn;
      const double second = static_cast<double>(acc.sumsq[idx]) / (scale * scale) / nn;
      const double se = std::sqrt(std::max(0.0, (second - mean * mean) / (nn - 1.0)));
      Statistic st;
      st.name = "abs_z[k=" + std::to_string(k) + ",e=" + e + "]";
      st.value = se > 0.0 ? std::fabs(mean) / se : (mean == 0.0 ? 0.0 : INFINITY);
      st.threshold = 4.0;
      st.check = Check::AtMost;
      st.standard_error = se;
      st.note = "mean=" + num(mean) + " draws_in_event=" + std::to_string(acc.hits[idx]);
      worst = std::max(worst, st.value);
      per.push_back(std::move(st));
    }
  }
  Statistic w;
  w.name = "max_abs_z";
  w.value = worst;
  w.threshold = 4.0;
  w.check = Check::AtMost;
  r.add(std::move(w));
  r.primary = 1;
  for (auto& st : per) r.add(std::move(st));
  r.add(info("draws_without_tau_n_max_plus_1", static_cast<double>(acc.incomplete)));
  return r;
}

TestReport stability_suite(const Sampler& s, std::uint64_t n, std::uint64_t seed) {
  const Sampler sampler = s.with_seed(seed);
  using SR = StoppingRule;
  const Rational one(1), two(2);
  const SR tpm = SR::two_sided(one, two);
  const SR up = SR::first_passage(0.5);
  const SR down = SR::first_passage(-0.75);
  const SR fix = SR::fixed(2.5);
  const SR tau3 = SR::ladder_step(one, two, 3);
  const SR capped = SR::min(SR::first_passage(1.0), SR::fixed(4.0));
  const SR late = SR::max(SR::first_passage(-0.5), SR::fixed(1.0));
  const SR mix = SR::mixture({{PrefixEvent::sign_at(SR::fixed(1.0), 1), SR::max(SR::fixed(1.0), SR::first_passage(1.5))}},
                             SR::max(SR::fixed(1.0), SR::first_passage(-1.5)));
  const SR mirrored = SR::compose_reflect(SR::first_passage(1.0), SR::fixed(0.0));
  const SR composed = SR::compose_reflect(SR::two_sided(0.5, 0.5), up);
  const std::vector<SR> rules{tpm, up, down, fix, tau3, capped, late, mix, mirrored, composed};
  const std::vector<std::pair<SR, SR>> pairs{{up, tpm},   {tpm, up},   {fix, down},  {tau3, tpm}, {tpm, tpm},
                                             {mix, fix},  {down, tau3}, {capped, late}, {late, mix}};
  const std::vector<double> levels{0.5, 1.0, 1.5};

  struct Acc {
    std::uint64_t involution = 0, fixed_point = 0, formula = 0, conjugation = 0, negation = 0, anticipation = 0,
                  order = 0, min_max = 0;
    std::uint64_t branch_le = 0, branch_gt = 0, branch_equal = 0, anticipation_checks = 0;
  };
  Acc acc = parallel_reduce(
      n, Acc{},
      [&](Acc& c, std::uint64_t i) {
        const Path p = sampler.sample(i);
        const Path other = sampler.sample(n + i);
        const Path neg = reflect_at_time(p, 0.0);
        for (const SR& t : rules) {
          const Hit h = evaluate_hit(t, p);
          const Path q = reflect_at_hit(p, h);
          c.involution += bump(reflect_at_rule(q, t) != annotate(p, h));
          const Hit hq = evaluate_hit(t, q);
          c.fixed_point += bump(!same_time(hq.time, h.time, kTimeTol) || (h.time.observed() && hq.value != h.value));
          if (auto spliced = splice_after(p, h, other)) {
            ++c.anticipation_checks;
            c.anticipation += bump(!same_time(evaluate(t, *spliced), h.time, kTimeTol));
          }
        }
        for (const auto& [a_rule, b_rule] : pairs) {
          const Hit hs = evaluate_hit(a_rule, p);
          const Hit ht = evaluate_hit(b_rule, p);
          const Path lhs = reflect_at_rule(p, SR::compose_reflect(a_rule, b_rule));
          const bool s_first = !(hs.time > ht.time);
          if (s_first) ++(a_rule == b_rule ? c.branch_equal : c.branch_le);
          else ++c.branch_gt;
          const Path rhs = s_first ? reflect_at_hit(p, hs)
                                   : reflect_at_rule(reflect_at_rule(reflect_at_hit(p, ht), a_rule), b_rule);
          c.formula += bump(!same_function(lhs, rhs, kTimeTol));
          if (a_rule == b_rule) c.formula += bump(!same_function(lhs, reflect_at_hit(p, ht), kTimeTol));

          const StopTime lo = std::min(hs.time, ht.time, [](StopTime x, StopTime y) { return x < y; });
          c.min_max += bump(evaluate(SR::min(a_rule, b_rule), p) != lo);
          const StopTime hi = hs.time < ht.time ? ht.time : hs.time;
          c.min_max += bump(evaluate(SR::max(a_rule, b_rule), p) != hi);

          const Hit& first = hs.time < ht.time ? hs : ht;
          if (auto spliced = splice_after(p, first, other)) {
            const int before = compare_times(hs.time, ht.time);
            const int after = compare_times(evaluate(a_rule, *spliced), evaluate(b_rule, *spliced));
            c.order += bump(before != after);
          }
        }
        for (double a : levels) {
          const SR ta = SR::first_passage(a);
          const SR tma = SR::first_passage(-a);
          c.conjugation += bump(reflect_at_rule(p, tma) != reflect_at_time(reflect_at_rule(neg, ta), 0.0));
          c.negation += bump(!same_time(evaluate(tma, p), evaluate(ta, neg), kTimeTol));
        }
      },
      [](Acc& into, const Acc& from) {
        into.involution += from.involution;
        into.fixed_point += from.fixed_point;
        into.formula += from.formula;
        into.conjugation += from.conjugation;
        into.negation += from.negation;
        into.anticipation += from.anticipation;
        into.order += from.order;
        into.min_max += from.min_max;
        into.branch_le += from.branch_le;
        into.branch_gt += from.branch_gt;
        into.branch_equal += from.branch_equal;
        into.anticipation_checks += from.anticipation_checks;
      });

  TestReport r;
  r.name = "stability_suite";
  r.seed = seed;
  r.params["law"] = s.describe();
  auto rs = nlohmann::ordered_json::array();
  for (const auto& t : rules) rs.push_back(t.describe());
  r.params["rules"] = rs;
  auto ps = nlohmann::ordered_json::array();
  for (const auto& [x, y] : pairs) ps.push_back({x.describe(), y.describe()});
  r.params["pairs"] = ps;
  r.params["time_tolerance"] = kTimeTol;
  r.sample_sizes.emplace_back("paths", n);
  r.add_count("involution_failures", acc.involution, "rho_T o rho_T = id, bit-exact");
  r.add_count("fixed_point_failures", acc.fixed_point, "T o rho_T = T");
  r.add_count("composition_formula_failures", acc.formula, "rho_{S o rho_T} against rho_S or rho_T rho_S rho_T");
  r.add_count("negative_level_conjugation_failures", acc.conjugation, "rho_{T_-a} = rho_0 rho_{T_a} rho_0, bit-exact");
  r.add_count("negative_level_time_failures", acc.negation, "T_-a = T_a o rho_0");
  r.add_count("non_anticipation_failures", acc.anticipation);
  r.add_count("order_consistency_failures", acc.order);
  r.add_count("min_max_failures", acc.min_max);
  r.add(info("formula_branch_s_before_t", static_cast<double>(acc.branch_le)));
  r.add(info("formula_branch_s_after_t", static_cast<double>(acc.branch_gt)));
  r.add(info("formula_branch_s_equals_t", static_cast<double>(acc.branch_equal)));
  r.add(info("non_anticipation_checks", static_cast<double>(acc.anticipation_checks)));
  return r;
}

TestReport sign_identity_suite(const Sampler& s, const Rational& a, const Rational& b, std::size_t n_words,
                               std::uint64_t n, std::uint64_t seed) {
  const LevelLadder ladder = ladder_levels(a, b, n_words);
  const StoppingRule t = StoppingRule::two_sided(a, b);
  const Sampler sampler = s.with_seed(seed);
  struct Acc {
    std::uint64_t negation = 0, reflection = 0, gamma = 0, gamma_inverse = 0, identity = 0;
    std::uint64_t with_minus = 0;
  };
  Acc acc = parallel_reduce(
      n, Acc{},
      [&](Acc& c, std::uint64_t i) {
        const Path p = sampler.sample(i);
        const LadderTrace tr = trace_ladder(ladder, p, n_words);
        const SignWord e(tr.signs);
        c.negation += bump(extract_signs(ladder, reflect_at_time(p, 0.0), n_words) != -e);
        c.reflection += bump(extract_signs(ladder, reflect_at_rule(p, t), n_words) != map_r(e));
        c.gamma += bump(extract_signs(ladder, apply_gamma(p, t, 1), n_words) != map_g(e));
        c.gamma_inverse += bump(extract_signs(ladder, apply_gamma(p, t, -1), n_words) != map_g_inverse(e));
        const StopTime hit = evaluate(t, p);
        if (auto m = first_minus(e)) {
          ++c.with_minus;
          c.identity += bump(!same_time(hit, tr.times[*m], kTimeTol));
        } else if (first_zero(e)) {
          c.identity += bump(hit.observed());
        } else {
          // T comes after tau_n: the word is all +1 so far.
          c.identity += bump(!(hit > tr.times[n_words]) || same_time(hit, tr.times[n_words], kTimeTol));
        }
      },
      [](Acc& into, const Acc& from) {
        into.negation += from.negation;
        into.reflection += from.reflection;
        into.gamma += from.gamma;
        into.gamma_inverse += from.gamma_inverse;
        into.identity += from.identity;
        into.with_minus += from.with_minus;
      });
  TestReport r;
  r.name = "sign_identity_suite";
  r.seed = seed;
  r.params["law"] = s.describe();
  r.params["a"] = a.str();
  r.params["b"] = b.str();
  r.params["n"] = n_words;
  r.sample_sizes.emplace_back("paths", n);
  r.add_count("negation_failures", acc.negation, "epsilon o rho_0 = -epsilon");
  r.add_count("reflection_failures", acc.reflection, "epsilon o rho_T = r o epsilon");
  r.add_count("gamma_failures", acc.gamma, "epsilon o gamma = g o epsilon");
  r.add_count("gamma_inverse_failures", acc.gamma_inverse, "epsilon o gamma^-1 = g^-1 o epsilon");
  r.add_count("hitting_identity_failures", acc.identity, "T = tau_m(epsilon)");
  r.add(info("paths_with_a_minus", static_cast<double>(acc.with_minus)));
  return r;
}

TestReport m_of_e_contract(const Sampler& s, const Rational& a, const Rational& b, std::size_t n_words,
                           std::uint64_t min_per_word, std::uint64_t max_draws, std::uint64_t seed) {
  if (n_words > 10) throw std::invalid_argument("m_of_e_contract: n must be <= 10");
  const LevelLadder ladder = ladder_levels(a, b, n_words);
  const StoppingRule t = StoppingRule::two_sided(a, b);
  const Sampler sampler = s.with_seed(seed);
  const std::vector<SignWord> words = enumerate_words(n_words);
  std::map<SignWord, std::size_t> index;
  for (std::size_t w = 0; w < words.size(); ++w) index.emplace(words[w], w);

  struct Acc {
    std::vector<std::uint64_t> count;
    std::vector<std::uint64_t> failures;
  };
  const Acc empty{std::vector<std::uint64_t>(words.size()), std::vector<std::uint64_t>(words.size())};
  Acc total = empty;
  std::uint64_t drawn = 0;
  constexpr std::uint64_t kBatch = 4096;
  auto done = [&] {
    return std::all_of(total.count.begin(), total.count.end(), [&](std::uint64_t c) { return c >= min_per_word; });
  };
  while (!done() && drawn < max_draws) {
    const std::uint64_t batch = std::min(kBatch, max_draws - drawn);
    const std::uint64_t offset = drawn;
    Acc part = parallel_reduce(
        batch, empty,
        [&](Acc& c, std::uint64_t i) {
          const Path p = sampler.sample(offset + i);
          const LadderTrace tr = trace_ladder(ladder, p, n_words);
          const SignWord e(tr.signs);
          const std::size_t w = index.at(e);
          ++c.count[w];
          const StopTime moved = evaluate(t, apply_gamma(p, t, m_of_e(e)));
          c.failures[w] += bump(!same_time(tr.times[n_words], moved, kTimeTol));
        },
        [](Acc& into, const Acc& from) {
          for (std::size_t w = 0; w < into.count.size(); ++w) {
            into.count[w] += from.count[w];
            into.failures[w] += from.failures[w];
          }
        });
    for (std::size_t w = 0; w < words.size(); ++w) {
      total.count[w] += part.count[w];
      total.failures[w] += part.failures[w];
    }
    drawn += batch;
  }

  TestReport r;
  r.name = "m_of_e_contract";
  r.seed = seed;
  r.params["law"] = s.describe();
  r.params["a"] = a.str();
  r.params["b"] = b.str();
  r.params["n"] = n_words;
  r.params["min_per_word"] = min_per_word;
  r.params["max_draws"] = max_draws;
  r.sample_sizes.emplace_back("draws", drawn);
  std::uint64_t failures = 0;
  std::uint64_t short_words = 0;
  std::uint64_t rarest = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t w = 0; w < words.size(); ++w) {
    failures += total.failures[w];
    short_words += bump(total.count[w] < min_per_word);
    rarest = std::min(rarest, total.count[w]);
  }
  r.add_count("identity_failures", failures, "tau_n = T o gamma^M(e)");
  r.add_count("words_below_minimum", short_words);
  r.add(info("rarest_word_count", static_cast<double>(rarest)));
  auto per = nlohmann::ordered_json::object();
  for (std::size_t w = 0; w < words.size(); ++w) {
    per[words[w].str()] = {{"M", m_of_e(words[w])}, {"draws", total.count[w]}, {"failures", total.failures[w]}};
  }
  r.details["words"] = per;
  return r;
}

}  // namespace reflectlab
