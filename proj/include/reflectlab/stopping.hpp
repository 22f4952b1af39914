#pragma once

#include "reflectlab/path.hpp"
#include "reflectlab/rational.hpp"

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace reflectlab {

/// Thrown when a/(a+b) is dyadic: the level ladder is undefined there.
class DyadicRatio : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The exact level sequence c_0 = 0, c_n = f(c_{n-1}) on (-a, b), where f is
/// the doubling map conjugated onto (-a, b), together with the exit sides
/// d_n in {-a, b}. c_{n-1} is the midpoint of [c_n, d_n].
class LevelLadder {
 public:
  const Rational& a() const { return a_; }
  const Rational& b() const { return b_; }
  /// Number of steps n (levels c_0..c_n are available).
  std::size_t steps() const { return c_.size() - 1; }
  const Rational& level(std::size_t n) const { return c_.at(n); }
  /// d_n for n >= 1.
  const Rational& exit_side(std::size_t n) const { return d_.at(n - 1); }
  /// |c_n - c_{n-1}| for n >= 1; equals the distance from c_{n-1} to {-a, b}.
  Rational step(std::size_t n) const { return abs(c_.at(n) - c_.at(n - 1)); }
  /// Sign of c_n - c_{n-1} (never 0).
  int direction(std::size_t n) const { return (c_.at(n) - c_.at(n - 1)).sign(); }

  /// Common denominator K of a and b; every level is an integer multiple of 1/K.
  std::int64_t scale() const { return scale_; }
  std::int64_t level_scaled(std::size_t n) const { return c_scaled_.at(n); }
  std::int64_t step_scaled(std::size_t n) const;

  /// q(x / K) with the same rounding as to_ticks(Rational).
  Ticks ticks_of_scaled(std::int64_t x) const;

 private:
  friend LevelLadder ladder_levels(const Rational& a, const Rational& b, std::size_t n);

  Rational a_, b_;
  std::vector<Rational> c_;
  std::vector<Rational> d_;
  std::int64_t scale_ = 1;
  std::vector<std::int64_t> c_scaled_;
};

/// Exact iteration of the level map. Throws DyadicRatio if a/(a+b) is dyadic,
/// std::invalid_argument unless a, b > 0.
LevelLadder ladder_levels(const Rational& a, const Rational& b, std::size_t n);

/// (c + a)/(b + a) is non-dyadic and c lies in (-a, b).
bool in_ladder_domain(const Rational& c, const Rational& a, const Rational& b);

class StoppingRule;
class PrefixEvent;

/// A stopping time together with the exact path value at it.
struct Hit {
  StopTime time;
  Ticks value = 0;
};

/// Declarative stopping time. Cheap to copy (shared immutable node).
class StoppingRule {
 public:
  enum class Kind { Fixed, FirstPassage, TwoSided, Ladder, Min, Max, Mixture, ComposeReflect };

  struct Branch;

  static StoppingRule fixed(double r);
  /// T_l, first time the path attains l (0 for l = 0).
  static StoppingRule first_passage(double level);
  static StoppingRule first_passage(const Rational& level);
  /// T_{-a} ^ T_b, the hitting time of {-a, b}; a, b > 0.
  static StoppingRule two_sided(double a, double b);
  static StoppingRule two_sided(const Rational& a, const Rational& b);
  /// tau_n of the (a, b) ladder.
  static StoppingRule ladder_step(const Rational& a, const Rational& b, std::size_t n);
  static StoppingRule min(StoppingRule s, StoppingRule t);
  static StoppingRule max(StoppingRule s, StoppingRule t);
  /// First branch whose event holds, else `otherwise`. Throws
  /// std::invalid_argument unless each selection region is measurable at the
  /// selected rule's own time (see PrefixEvent::measurable_at).
  static StoppingRule mixture(std::vector<Branch> branches, StoppingRule otherwise);
  /// S o rho_T: S evaluated on the path reflected at T.
  static StoppingRule compose_reflect(StoppingRule s, StoppingRule t);

  Kind kind() const;
  /// Canonical text form (the CLI grammar); structural identity.
  std::string describe() const;

  /// True when this time is >= other on every path (structural check).
  bool dominates(const StoppingRule& other) const;

  friend bool operator==(const StoppingRule& a, const StoppingRule& b) {
    return a.describe() == b.describe();
  }

  struct Node;
  const Node& node() const { return *node_; }

 private:
  explicit StoppingRule(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Closed vocabulary of prefix events for mixtures.
class PrefixEvent {
 public:
  enum class Kind { Order, Sign, Observed };

  /// {U <= V} (NOT_OBSERVED sorts last).
  static PrefixEvent order(StoppingRule u, StoppingRule v);
  /// {U observed and sign(X_U) == sign}, sign in {-1, +1}.
  static PrefixEvent sign_at(StoppingRule u, int sign);
  /// {U observed}.
  static PrefixEvent observed(StoppingRule u);

  Kind kind() const { return kind_; }
  std::string describe() const;
  bool holds(const Path& p) const;
  /// Event is in F_S for the rule S: decidable from the path on [0, S].
  bool measurable_at(const StoppingRule& s) const;

 private:
  PrefixEvent(Kind k, StoppingRule u, StoppingRule v, int sign)
      : kind_(k), u_(std::move(u)), v_(std::move(v)), sign_(sign) {}

  Kind kind_;
  StoppingRule u_;
  StoppingRule v_;
  int sign_;
};

struct StoppingRule::Branch {
  PrefixEvent event;
  StoppingRule rule;
};

Hit evaluate_hit(const StoppingRule& rule, const Path& p);
StopTime evaluate(const StoppingRule& rule, const Path& p);

/// rho_T: p itself if T is not observed, otherwise p with a knot at T holding
/// the exact value there and every later value mirrored about it.
Path reflect_at_rule(const Path& p, const StoppingRule& rule);
Path reflect_at_hit(const Path& p, const Hit& hit);

/// Outcome of running the ladder on one path.
struct LadderTrace {
  /// tau_0..tau_n; NOT_OBSERVED from the first unrealized step on.
  std::vector<StopTime> times;
  /// epsilon_1..epsilon_n in {-1, 0, +1}: +1 when the path moved by
  /// c_k - c_{k-1}, -1 when it moved by the opposite amount.
  std::vector<int> signs;
  /// Exact anchor w(tau_k) in units of 1/K for every observed k.
  std::vector<std::int64_t> anchors_scaled;
  /// Segment index holding each observed tau_k.
  std::vector<std::size_t> segments;
};

LadderTrace trace_ladder(const LevelLadder& ladder, const Path& p, std::size_t n_max);

struct LadderTimes {
  std::vector<StopTime> times;
  /// p with every finite tau_n inserted as a knot at its exact level.
  Path annotated;
};

LadderTimes ladder_times(const Rational& a, const Rational& b, const Path& p, std::size_t n_max);

struct MartingaleStep {
  Rational y;          ///< Y_n exactly
  double value = 0.0;  ///< Y_n as double
  std::size_t last_observed = 0;  ///< D_n = max{k <= n : tau_k observed}
};

/// Y_n = X at tau_{D_n}, n = 0..n_max.
std::vector<MartingaleStep> discrete_martingale_track(const Rational& a, const Rational& b,
                                                      const Path& p, std::size_t n_max);

}  // namespace reflectlab
