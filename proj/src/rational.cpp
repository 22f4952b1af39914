#include "reflectlab/rational.hpp"

#include <boost/multiprecision/integer.hpp>

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace reflectlab {

Rational::Rational(std::int64_t n) : num_(n), den_(1) {}

Rational::Rational(BigInt num, BigInt den) : num_(std::move(num)), den_(std::move(den)) {
  if (den_ == 0) throw std::invalid_argument("Rational: zero denominator");
  normalize();
}

void Rational::normalize() {
  if (den_.sign() < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  BigInt g = boost::multiprecision::gcd(num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
  if (num_ == 0) den_ = 1;
}

namespace {

BigInt parse_integer(std::string_view s, bool allow_sign) {
  std::size_t i = 0;
  bool negative = false;
  if (allow_sign && !s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    i = 1;
  }
  if (i == s.size()) throw std::invalid_argument("Rational: empty integer");
  BigInt v = 0;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c < '0' || c > '9') {
      throw std::invalid_argument("Rational: bad digit in '" + std::string(s) + "'");
    }
    v = v * 10 + (c - '0');
  }
  return negative ? BigInt(-v) : v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational Rational::parse(std::string_view text) {
  text = trim(text);
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(text, true), 1);
  BigInt n = parse_integer(trim(text.substr(0, slash)), true);
  BigInt d = parse_integer(trim(text.substr(slash + 1)), false);
  if (d == 0) throw std::invalid_argument("Rational: zero denominator in '" + std::string(text) + "'");
  return Rational(std::move(n), std::move(d));
}

bool is_power_of_two(const BigInt& n) {
  if (n <= 0) return false;
  return (n & (n - 1)) == 0;
}

bool Rational::is_dyadic() const { return is_power_of_two(den_); }

double Rational::to_double() const {
  if (num_ == 0) return 0.0;
  // Scale so the integer quotient carries at least 64 significant bits, then
  // round once; the sticky bit from the remainder keeps the rounding exact.
  BigInt n = boost::multiprecision::abs(num_);
  const std::size_t nbits = boost::multiprecision::msb(n) + 1;
  const std::size_t dbits = boost::multiprecision::msb(den_) + 1;
  long shift = 66 - static_cast<long>(nbits) + static_cast<long>(dbits);
  BigInt scaled = shift >= 0 ? BigInt(n << shift) : BigInt(n >> -shift);
  BigInt q = scaled / den_;
  BigInt r = scaled % den_;
  if (shift < 0 && (n & ((BigInt(1) << -shift) - 1)) != 0) r = 1;
  if (r != 0) q |= 1;  // sticky
  // q has 65..67 bits; convert via long double-free path: split high part.
  const std::size_t qbits = boost::multiprecision::msb(q) + 1;
  const std::size_t drop = qbits - 53;
  BigInt mant = q >> drop;
  BigInt rest = q & ((BigInt(1) << drop) - 1);
  BigInt half = BigInt(1) << (drop - 1);
  if (rest > half || (rest == half && (mant & 1) != 0)) mant += 1;
  double v = std::ldexp(mant.convert_to<double>(),
                        static_cast<int>(drop) - static_cast<int>(shift));
  return num_.sign() < 0 ? -v : v;
}

std::string Rational::str() const {
  if (den_ == 1) return num_.str();
  return num_.str() + "/" + den_.str();
}

Rational Rational::operator-() const {
  Rational r = *this;
  r.num_ = -r.num_;
  return r;
}

Rational& Rational::operator+=(const Rational& o) {
  num_ = num_ * o.den_ + o.num_ * den_;
  den_ *= o.den_;
  normalize();
  return *this;
}

Rational& Rational::operator-=(const Rational& o) {
  num_ = num_ * o.den_ - o.num_ * den_;
  den_ *= o.den_;
  normalize();
  return *this;
}

Rational& Rational::operator*=(const Rational& o) {
  num_ *= o.num_;
  den_ *= o.den_;
  normalize();
  return *this;
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.num_ == 0) throw std::domain_error("Rational: division by zero");
  num_ *= o.den_;
  den_ *= o.num_;
  normalize();
  return *this;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  BigInt l = a.num_ * b.den_;
  BigInt r = b.num_ * a.den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace reflectlab
