#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace reflectlab {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational number with arbitrary-precision numerator and denominator.
///
/// Always stored in lowest terms with a positive denominator, so structural
/// equality is value equality and the dyadic test is a single bit check.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t n);  // NOLINT(google-explicit-constructor)
  Rational(BigInt num, BigInt den);

  /// Parses "p/q" or "p" (optional sign on p). Throws std::invalid_argument.
  static Rational parse(std::string_view text);

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }

  /// Reduced denominator is a power of two.
  bool is_dyadic() const;
  bool is_integer() const { return den_ == 1; }
  int sign() const { return num_.sign(); }

  /// Correctly rounded (nearest) conversion.
  double to_double() const;
  std::string str() const;

  Rational operator-() const;
  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  void normalize();

  BigInt num_{0};
  BigInt den_{1};
};

Rational abs(const Rational& r);

std::ostream& operator<<(std::ostream& os, const Rational& r);

/// True iff the positive integer n is a power of two.
bool is_power_of_two(const BigInt& n);

}  // namespace reflectlab
