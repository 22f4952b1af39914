#pragma once

#include "reflectlab/rational.hpp"

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace reflectlab {

/// Path values are fixed-point integers: one tick is 2^-40 in value units.
///
/// Prefix sums, negated suffixes and 2a - x are then exact, so every
/// reflection is a bit-exact involution.
using Ticks = std::int64_t;

inline constexpr int kTickBits = 40;
inline constexpr double kTick = 1.0 / static_cast<double>(std::int64_t{1} << kTickBits);
/// Largest admissible |value| in ticks; 3x this still fits in int64.
inline constexpr Ticks kMaxTicks = Ticks{1} << 60;

/// Nearest tick, ties away from zero (so to_ticks(-x) == -to_ticks(x)).
Ticks to_ticks(double value);
Ticks to_ticks(const Rational& value);
inline double ticks_to_double(Ticks t) { return static_cast<double>(t) * kTick; }

/// A stopping time observed within the horizon, or NOT_OBSERVED (the
/// finite-horizon stand-in for +infinity). NOT_OBSERVED sorts after every
/// finite time.
class StopTime {
 public:
  constexpr StopTime() = default;
  constexpr explicit StopTime(double t) : t_(t), observed_(true) {}
  static constexpr StopTime never() { return StopTime(); }

  constexpr bool observed() const { return observed_; }
  constexpr double time() const { return t_; }
  /// time() when observed, otherwise the given fallback.
  constexpr double value_or(double fallback) const { return observed_ ? t_ : fallback; }

  friend constexpr bool operator==(StopTime a, StopTime b) {
    return a.observed_ == b.observed_ && (!a.observed_ || a.t_ == b.t_);
  }
  friend constexpr std::partial_ordering operator<=>(StopTime a, StopTime b) {
    if (!a.observed_ || !b.observed_) {
      return static_cast<int>(a.observed_ ? 0 : 1) <=> static_cast<int>(b.observed_ ? 0 : 1);
    }
    return a.t_ <=> b.t_;
  }

 private:
  double t_ = std::numeric_limits<double>::infinity();
  bool observed_ = false;
};

std::ostream& operator<<(std::ostream& os, StopTime t);

/// Equal observation status and, when observed, |t1 - t2| <= tol.
bool same_time(StopTime a, StopTime b, double tol);

/// Piecewise-linear path on [0, horizon] with w(0) = 0.
///
/// Knot times are strictly increasing from 0; knot values are stored exactly
/// in ticks. Immutable: every transformation returns a new Path.
class Path {
 public:
  /// The constant path 0 on [0, horizon].
  explicit Path(double horizon = 1.0);

  /// From knot times and per-knot increments (increments[0] must be 0).
  static Path from_increments(std::vector<double> knots, std::span<const double> increments);
  /// From knot times and knot values (values[0] must be 0).
  static Path from_values(std::vector<double> knots, std::span<const double> values);
  static Path from_ticks(std::vector<double> knots, std::vector<Ticks> values);

  std::size_t size() const { return knots_.size(); }
  double horizon() const { return knots_.back(); }
  std::span<const double> knots() const { return knots_; }
  std::span<const Ticks> values() const { return values_; }
  double knot_time(std::size_t i) const { return knots_[i]; }
  Ticks knot_ticks(std::size_t i) const { return values_[i]; }
  double knot_value(std::size_t i) const { return ticks_to_double(values_[i]); }
  /// Delta_i = w(t_i) - w(t_{i-1}); entry 0 is 0.
  std::vector<double> increments() const;

  /// Index i of the segment [t_i, t_{i+1}] holding t (last segment for t = horizon).
  std::size_t segment_of(double t) const;
  /// Index of the knot exactly at t, or size() if none.
  std::size_t knot_index(double t) const;

  /// Piecewise-linear interpolant; exact at knots. Throws outside [0, horizon].
  double value_at(double t) const;
  /// value_at(t) for t inside segment i (no search).
  double value_on_segment(std::size_t i, double t) const;
  /// value_at rounded to ticks; exact at knots.
  Ticks ticks_at(double t) const;

  /// Copy with a knot at t whose value is exactly v (ticks). v must lie
  /// between the neighbouring knot values; an existing knot must already
  /// hold v. Throws std::invalid_argument otherwise.
  Path with_knot(double t, Ticks v) const;

  /// Knots strictly after knot index k get value 2 w_k - w_j.
  Path reflected_after_knot(std::size_t k) const;

  /// with_knot(t, v) reflected after the new knot, in one pass.
  Path reflected_at(double t, Ticks v) const;

  /// Restriction to [0, t] (t becomes the horizon).
  Path truncated(double t) const;

  /// This path on [0, t] followed by the increments of `tail` (shifted by t).
  Path spliced(double t, const Path& tail) const;

  /// Same knots and bit-identical values.
  friend bool operator==(const Path& a, const Path& b) = default;

 private:
  Path(std::vector<double> knots, std::vector<Ticks> values, bool);
  void validate() const;

  std::vector<double> knots_;
  std::vector<Ticks> values_;
};

/// Value at every knot of either path agrees within tol (absolute), and the
/// horizons match.
bool same_function(const Path& a, const Path& b, double tol);

/// Tolerance-checked knot insertion: v may deviate from the segment
/// (|v - left| + |right - v| = |right - left|) by relative 1e-9.
Path insert_knot(const Path& p, double t, double v);

/// rho_r: values before r unchanged, after r mirrored about w(r).
Path reflect_at_time(const Path& p, double r);

/// CSV with header `t,x`, one knot per line, 17 significant digits.
void write_csv(std::ostream& os, const Path& p);
std::string to_csv(const Path& p);
Path read_csv(std::istream& is);

}  // namespace reflectlab
