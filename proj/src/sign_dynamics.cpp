#include "reflectlab/sign_dynamics.hpp"

#include <stdexcept>

namespace reflectlab {

SignWord::SignWord(std::vector<int> entries) : e_(std::move(entries)) {
  bool zero_seen = false;
  for (int x : e_) {
    if (x < -1 || x > 1) throw std::invalid_argument("SignWord: entries must be in {-1,0,1}");
    if (zero_seen && x != 0) throw std::invalid_argument("SignWord: nonzero entry after a zero");
    zero_seen = zero_seen || x == 0;
  }
}

SignWord SignWord::parse(std::string_view text) {
  std::vector<int> e;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '+') {
      e.push_back(1);
    } else if (c == '-') {
      e.push_back(-1);
    } else if (c == '0') {
      e.push_back(0);
    } else if (text.substr(i, 3) == "\xE2\x88\x92") {
      e.push_back(-1);
      i += 2;
    } else {
      throw std::invalid_argument("SignWord: unexpected character in '" + std::string(text) + "'");
    }
  }
  return SignWord(std::move(e));
}

SignWord SignWord::ones(std::size_t n) { return SignWord(std::vector<int>(n, 1)); }

std::size_t SignWord::depth() const {
  std::size_t d = 0;
  while (d < e_.size() && e_[d] != 0) ++d;
  return d;
}

SignWord SignWord::operator-() const {
  SignWord out = *this;
  for (int& x : out.e_) x = -x;
  return out;
}

SignWord SignWord::concat(const SignWord& tail) const {
  std::vector<int> e = e_;
  e.insert(e.end(), tail.e_.begin(), tail.e_.end());
  return SignWord(std::move(e));
}

std::string SignWord::str() const {
  std::string s;
  s.reserve(e_.size());
  for (int x : e_) s.push_back(x > 0 ? '+' : (x < 0 ? '-' : '0'));
  return s;
}

std::optional<std::size_t> first_minus(const SignWord& e) {
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] == -1) return i + 1;
  }
  return std::nullopt;
}

std::optional<std::size_t> first_zero(const SignWord& e) {
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] == 0) return i + 1;
  }
  return std::nullopt;
}

SignWord map_r(const SignWord& e) {
  const auto m = first_minus(e);
  if (!m) return e;
  std::vector<int> f(e.entries().begin(), e.entries().end());
  for (std::size_t i = *m; i < f.size(); ++i) f[i] = -f[i];
  return SignWord(std::move(f));
}

SignWord map_g(const SignWord& e) { return map_r(-e); }

SignWord map_g_inverse(const SignWord& e) { return -map_r(e); }

SignWord map_g_power(SignWord e, std::int64_t k) {
  for (; k > 0; --k) e = map_g(e);
  for (; k < 0; ++k) e = map_g_inverse(e);
  return e;
}

SignWord g_power_formula(std::size_t n, std::uint64_t N, const SignWord& sigma) {
  if (n >= 64 || N >= (std::uint64_t{1} << n)) {
    throw std::out_of_range("g_power_formula: N must satisfy 0 <= N < 2^n");
  }
  std::vector<int> head(n);
  for (std::size_t i = 0; i < n; ++i) head[i] = ((N >> i) & 1U) ? -1 : 1;
  return SignWord(std::move(head)).concat(sigma);
}

std::int64_t m_of_e(const SignWord& e) {
  const std::size_t n = e.size();
  if (n == 0 || n > 62) throw std::invalid_argument("m_of_e: word length must be in [1, 62]");
  const std::size_t d = e.depth();
  std::int64_t digits = 0;
  for (std::size_t i = 0; i < d; ++i) {
    if (e[i] == -1) digits += std::int64_t{1} << i;
  }
  if (d == n) return (std::int64_t{1} << (n - 1)) - digits;
  return -digits;
}

SignWord extract_signs(const LevelLadder& ladder, const Path& p, std::size_t n) {
  LadderTrace tr = trace_ladder(ladder, p, n);
  return SignWord(std::move(tr.signs));
}

SignWord extract_signs(const Rational& a, const Rational& b, const Path& p, std::size_t n) {
  return extract_signs(ladder_levels(a, b, n), p, n);
}

Path apply_gamma(const Path& p, const StoppingRule& t, std::int64_t k) {
  Path q = p;
  for (; k > 0; --k) q = reflect_at_rule(reflect_at_time(q, 0.0), t);
  for (; k < 0; ++k) q = reflect_at_time(reflect_at_rule(q, t), 0.0);
  return q;
}

std::vector<SignWord> enumerate_words(std::size_t n) {
  std::vector<SignWord> out;
  // Depth d: 2^d sign patterns followed by n - d zeros.
  for (std::size_t d = 0; d <= n; ++d) {
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << d); ++bits) {
      std::vector<int> e(n, 0);
      for (std::size_t i = 0; i < d; ++i) e[i] = ((bits >> i) & 1U) ? -1 : 1;
      out.emplace_back(std::move(e));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace reflectlab
