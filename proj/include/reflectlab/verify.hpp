#pragma once

#include "reflectlab/rational.hpp"
#include "reflectlab/report.hpp"
#include "reflectlab/samplers.hpp"
#include "reflectlab/stopping.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace reflectlab {

/// The sampled paths do not satisfy the hypothesis a check relies on.
class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// True iff at least one of a/(a+b), b/(b+c), a/(a+c) is non-dyadic.
/// Requires c > b > a > 0 (std::invalid_argument otherwise).
bool check_non_dyadic_triple(const Rational& a, const Rational& b, const Rational& c);

/// check_non_dyadic_triple over all integer triples 0 < a < b < c <= max_c.
TestReport non_dyadic_sweep(std::int64_t max_c);

/// g_power_formula against iterated map_g for every n <= n_max and N < 2^n,
/// both closed forms, suffixes headed by +1 and by -1.
TestReport g_power_exhaustive(std::size_t n_max);

/// map_g is a bijection of Sigma_n with inverse map_g_inverse, n <= n_max.
TestReport g_bijection_exhaustive(std::size_t n_max);

/// Real-valued path functional from a fixed vocabulary.
class Functional {
 public:
  enum class Kind { ValueAt, RunningMax, HittingTime, ValueAtRule };

  static Functional value_at(double t);
  static Functional running_max();
  /// First-passage time of `level`; NOT_OBSERVED maps to horizon + 1.
  static Functional hitting_time(double level);
  /// Path value at min(S, horizon).
  static Functional value_at_rule(StoppingRule s);

  /// `value(t)`, `max`, `hit(level)`, `at(rule)`.
  static Functional parse(std::string_view text);

  Kind kind() const { return kind_; }
  std::string describe() const;
  double operator()(const Path& p) const;

 private:
  Functional(Kind k, double x, std::optional<StoppingRule> s) : kind_(k), x_(x), rule_(std::move(s)) {}

  Kind kind_;
  double x_ = 0.0;
  std::optional<StoppingRule> rule_;
};

/// value(t) at t = 1 and the horizon, max, hit(1) and at(T).
std::vector<Functional> default_functionals(const Sampler& s, const StoppingRule& t);

/// Two-sample KS test per functional between laws of X and rho_T(X);
/// Bonferroni-adjusted, pass iff every adjusted p-value exceeds alpha.
/// Draws 0..N-1 feed the plain arm and draws N..2N-1 the reflected arm.
TestReport invariance_test(const Sampler& s, const StoppingRule& t, const std::vector<Functional>& functionals,
                           std::uint64_t n, std::uint64_t seed, double alpha = 0.001);

/// Empirical mean of X_S with its standard error. Passes iff
/// |mean| <= a + b + 4 SE and, when `expected` is given, |mean - expected| <= 4 SE.
/// Throws HypothesisError if S is not observed on some draw or
/// sup_{t <= S} |X_t| exceeds bound_cap.
TestReport bound_check(const Sampler& s, const Rational& a, const Rational& b, const StoppingRule& stop,
                       double bound_cap, std::uint64_t n, std::uint64_t seed,
                       std::optional<double> expected = std::nullopt);

/// E[(Y_{k+1} - Y_k) 1_A] within 4 SE of 0 for A = {epsilon_1..k = e}, every
/// k <= n_max and e in {-1,+1}^k; plus the exact identity
/// (Y_{k+1} - Y_k) o rho_{tau_k} = -(Y_{k+1} - Y_k) on every draw.
TestReport martingale_step_test(const Sampler& s, const Rational& a, const Rational& b, std::size_t n_max,
                                std::uint64_t n, std::uint64_t seed);

/// Pathwise reflection identities over a battery of rules and rule pairs:
/// involution, T o rho_T = T, the composition formulas, reflection at -a as
/// a conjugate by rho_0, non-anticipation, order consistency, min/max.
TestReport stability_suite(const Sampler& s, std::uint64_t n, std::uint64_t seed);

/// epsilon o rho_0 = -epsilon, epsilon o rho_T = r o epsilon,
/// epsilon o gamma^{+-1} = g^{+-1} o epsilon and T = tau_{m(epsilon)} pathwise.
TestReport sign_identity_suite(const Sampler& s, const Rational& a, const Rational& b, std::size_t n_words,
                               std::uint64_t n, std::uint64_t seed);

/// tau_n = T o gamma^{M(e)} on draws with epsilon_1..n = e. Draws until every
/// e in Sigma_n was seen min_per_word times or max_draws is reached.
TestReport m_of_e_contract(const Sampler& s, const Rational& a, const Rational& b, std::size_t n_words,
                           std::uint64_t min_per_word, std::uint64_t max_draws, std::uint64_t seed);

}  // namespace reflectlab
