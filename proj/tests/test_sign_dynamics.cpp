#include "doctest.h"
#include "reflectlab/samplers.hpp"
#include "reflectlab/sign_dynamics.hpp"

#include <set>

using namespace reflectlab;

namespace {
SignWord W(const char* s) { return SignWord::parse(s); }
}  // namespace

TEST_CASE("sign word validation and parsing") {
  CHECK_THROWS_AS(SignWord({1, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(SignWord({2}), std::invalid_argument);
  CHECK(W("+-0").entries().size() == 3);
  CHECK(W("+−0") == W("+-0"));
  CHECK(W("+-0").str() == "+-0");
  CHECK(W("+-0").depth() == 2);
  CHECK_THROWS(SignWord::parse("+x"));
}

TEST_CASE("first minus and first zero") {
  CHECK(first_minus(W("+-0")) == 2u);
  CHECK(first_zero(W("+-0")) == 3u);
  CHECK_FALSE(first_minus(W("+++")).has_value());
  CHECK_FALSE(first_zero(W("+++")).has_value());
  CHECK(first_minus(W("-00")) == 1u);
  CHECK(first_zero(W("-00")) == 2u);
}

TEST_CASE("maps r and g") {
  CHECK(map_r(W("+-+")) == W("+--"));
  for (const char* sigma : {"+", "-", "+-", "-+", "0"}) {
    const SignWord s = W(sigma);
    const SignWord e = W("++").concat(s);
    CHECK(map_g(e) == W("-+").concat(s));
    CHECK(map_g(map_g(e)) == W("+-").concat(s));
  }
}

TEST_CASE("g is a bijection of Sigma_n and r an involution") {
  for (std::size_t n = 0; n <= 7; ++n) {
    const auto words = enumerate_words(n);
    std::set<SignWord> images;
    for (const auto& e : words) {
      const SignWord ge = map_g(e);
      CHECK(ge.size() == n);
      images.insert(ge);
      CHECK(map_g_inverse(ge) == e);
      CHECK(map_r(map_r(e)) == e);
    }
    CHECK(images.size() == words.size());
  }
  CHECK(enumerate_words(3).size() == 15);
}

TEST_CASE("g power formula") {
  const SignWord sigma = W("-+");
  CHECK(g_power_formula(3, 0, sigma) == SignWord::ones(3).concat(sigma));
  CHECK(g_power_formula(2, 2, sigma) == W("+-").concat(sigma));
  CHECK_THROWS_AS(g_power_formula(2, 4, sigma), std::out_of_range);
  for (std::size_t n = 1; n <= 6; ++n) {
    for (std::uint64_t N = 0; N < (1u << n); ++N) {
      CHECK(g_power_formula(n, N, sigma) == map_g_power(SignWord::ones(n).concat(sigma), static_cast<std::int64_t>(N)));
    }
  }
  CHECK(map_g_power(map_g_power(W("+-+0"), 5), -5) == W("+-+0"));
}

TEST_CASE("M(e) formula") {
  CHECK(m_of_e(W("+++-")) == 0);
  CHECK(m_of_e(W("0000")) == 0);
  CHECK(m_of_e(W("----")) == 8 - 15);
  CHECK(m_of_e(W("++++")) == 8);
  CHECK(m_of_e(W("-+00")) == -1);
  CHECK(m_of_e(W("--00")) == -3);
}

TEST_CASE("extract signs") {
  const Rational a(1), b(2);
  const Path line = Path::from_values({0, 3}, std::vector<double>{0, 3});
  CHECK(extract_signs(a, b, line, 3) == W("+-+"));
  CHECK(extract_signs(a, b, line, 4) == W("+-+0"));
  CHECK(extract_signs(a, b, Path(4.0), 3) == W("000"));

  const Sampler s(BrownianLaw{1e-3, 4.0}, 11);
  const LevelLadder ladder = ladder_levels(a, b, 8);
  const auto t = StoppingRule::two_sided(a, b);
  for (std::uint64_t i = 0; i < 100; ++i) {
    const Path p = s.sample(i);
    const SignWord e = extract_signs(ladder, p, 8);
    CHECK(extract_signs(ladder, reflect_at_time(p, 0.0), 8) == -e);
    CHECK(extract_signs(ladder, reflect_at_rule(p, t), 8) == map_r(e));
    CHECK(extract_signs(ladder, apply_gamma(p, t, 1), 8) == map_g(e));
    CHECK(extract_signs(ladder, apply_gamma(p, t, -1), 8) == map_g_inverse(e));
  }
}
