#pragma once

#include "reflectlab/path.hpp"
#include "reflectlab/stopping.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace reflectlab {

/// Finite word over {-1, 0, +1} in which every entry after the first 0 is 0
/// (an element of Sigma_n).
class SignWord {
 public:
  SignWord() = default;
  /// Throws std::invalid_argument on entries outside {-1,0,1} or a nonzero
  /// entry after a zero.
  explicit SignWord(std::vector<int> entries);
  /// Parses the compact form over {+, -, 0}; ASCII '-' and U+2212 accepted.
  static SignWord parse(std::string_view text);
  static SignWord ones(std::size_t n);

  std::size_t size() const { return e_.size(); }
  int operator[](std::size_t i) const { return e_[i]; }
  std::span<const int> entries() const { return e_; }
  /// Number of nonzero entries.
  std::size_t depth() const;

  SignWord operator-() const;
  SignWord concat(const SignWord& tail) const;
  std::string str() const;

  friend bool operator==(const SignWord&, const SignWord&) = default;
  friend auto operator<=>(const SignWord&, const SignWord&) = default;

 private:
  std::vector<int> e_;
};

/// 1-based index of the first -1 (m) / first 0 (m_0); nullopt when absent.
std::optional<std::size_t> first_minus(const SignWord& e);
std::optional<std::size_t> first_zero(const SignWord& e);

/// r: entries after the first -1 change sign. An involution on Sigma_n.
SignWord map_r(const SignWord& e);
/// g(e) = r(-e).
SignWord map_g(const SignWord& e);
/// g^{-1}(e) = -r(e).
SignWord map_g_inverse(const SignWord& e);
/// g^k for any integer k (inverse powers for k < 0).
SignWord map_g_power(SignWord e, std::int64_t k);

/// Closed form of g^N(1_n, sigma): ((-1)^{a_0}, ..., (-1)^{a_{n-1}}, sigma)
/// where a_i are the base-2 digits of N. Requires 0 <= N < 2^n.
SignWord g_power_formula(std::size_t n, std::uint64_t N, const SignWord& sigma);

/// The exponent M(e) with tau_n = T o gamma^{M(e)} on {epsilon_1..n = e}.
std::int64_t m_of_e(const SignWord& e);

/// epsilon_1..epsilon_n of p for the (a, b) ladder.
SignWord extract_signs(const LevelLadder& ladder, const Path& p, std::size_t n);
SignWord extract_signs(const Rational& a, const Rational& b, const Path& p, std::size_t n);

/// gamma = rho_T o rho_0 applied k times (gamma^{-1} = rho_0 o rho_T for k < 0).
Path apply_gamma(const Path& p, const StoppingRule& t, std::int64_t k);

/// All elements of Sigma_n, in lexicographic order.
std::vector<SignWord> enumerate_words(std::size_t n);

}  // namespace reflectlab
