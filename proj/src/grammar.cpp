#include "reflectlab/grammar.hpp"

#include <cctype>
#include <charconv>
#include <stdexcept>
#include <string>
#include <variant>

namespace reflectlab {

namespace {

using Level = std::variant<double, Rational>;

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  StoppingRule rule() {
    const std::string name = ident();
    expect('(');
    StoppingRule r = StoppingRule::fixed(0.0);
    if (name == "fixed") {
      r = StoppingRule::fixed(decimal(token()));
    } else if (name == "hit") {
      const Level l = level(token());
      r = std::holds_alternative<Rational>(l) ? StoppingRule::first_passage(std::get<Rational>(l))
                                              : StoppingRule::first_passage(std::get<double>(l));
    } else if (name == "Tpm") {
      const Level a = level(token());
      expect(',');
      const Level b = level(token());
      if (std::holds_alternative<Rational>(a) && std::holds_alternative<Rational>(b)) {
        r = StoppingRule::two_sided(std::get<Rational>(a), std::get<Rational>(b));
      } else {
        r = StoppingRule::two_sided(as_double(a), as_double(b));
      }
    } else if (name == "tau") {
      const Rational a = rational(token());
      expect(',');
      const Rational b = rational(token());
      expect(',');
      const std::string n = token();
      std::size_t steps = 0;
      auto [ptr, ec] = std::from_chars(n.data(), n.data() + n.size(), steps);
      if (ec != std::errc() || ptr != n.data() + n.size()) fail("step count expected");
      r = StoppingRule::ladder_step(a, b, steps);
    } else if (name == "min" || name == "max" || name == "compose") {
      StoppingRule x = rule();
      expect(',');
      StoppingRule y = rule();
      r = name == "min" ? StoppingRule::min(x, y)
          : name == "max" ? StoppingRule::max(x, y)
                          : StoppingRule::compose_reflect(x, y);
    } else if (name == "mix") {
      std::vector<StoppingRule::Branch> branches;
      for (;;) {
        // Either "event?rule:" or the final rule.
        const std::size_t mark = pos_;
        const std::string head = ident();
        pos_ = mark;
        if (head == "le" || head == "pos" || head == "neg" || head == "seen") {
          PrefixEvent e = event();
          expect('?');
          StoppingRule b = rule();
          expect(':');
          branches.push_back({std::move(e), std::move(b)});
        } else {
          r = StoppingRule::mixture(std::move(branches), rule());
          break;
        }
      }
    } else {
      fail("unknown rule '" + name + "'");
    }
    expect(')');
    return r;
  }

  PrefixEvent event() {
    const std::string name = ident();
    expect('(');
    StoppingRule u = rule();
    PrefixEvent e = PrefixEvent::observed(u);
    if (name == "le") {
      expect(',');
      e = PrefixEvent::order(u, rule());
    } else if (name == "pos" || name == "neg") {
      e = PrefixEvent::sign_at(u, name == "pos" ? 1 : -1);
    } else if (name != "seen") {
      fail("unknown event '" + name + "'");
    }
    expect(')');
    return e;
  }

  void finish() {
    skip();
    if (pos_ != s_.size()) fail("trailing input");
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("rule grammar: " + what + " at offset " + std::to_string(pos_) + " in '" +
                                std::string(s_) + "'");
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string ident() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("name expected");
    return std::string(s_.substr(start, pos_ - start));
  }

  /// A number literal up to the next delimiter.
  std::string token() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      ++pos_;
    }
    if (start == pos_) fail("number expected");
    return std::string(s_.substr(start, pos_ - start));
  }

  double decimal(const std::string& t) const {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) fail("bad number '" + t + "'");
    return v;
  }

  Rational rational(const std::string& t) const {
    try {
      return Rational::parse(t);
    } catch (const std::invalid_argument&) {
      fail("exact rational expected, got '" + t + "'");
    }
  }

  Level level(const std::string& t) const {
    if (t.find_first_of(".eE") == std::string::npos) return rational(t);
    return decimal(t);
  }

  static double as_double(const Level& l) {
    return std::holds_alternative<double>(l) ? std::get<double>(l) : std::get<Rational>(l).to_double();
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

StoppingRule parse_rule(std::string_view text) {
  Parser p(text);
  StoppingRule r = p.rule();
  p.finish();
  return r;
}

PrefixEvent parse_event(std::string_view text) {
  Parser p(text);
  PrefixEvent e = p.event();
  p.finish();
  return e;
}

}  // namespace reflectlab
