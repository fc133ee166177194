#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace bell {

/// Exact rational number with arbitrary-precision numerator and denominator.
///
/// Always held in canonical form: the denominator is positive and shares no
/// factor with the numerator. Every arithmetic result is re-canonicalized.
class Rational {
 public:
  Rational() = default;
  Rational(long value) : value_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(long numerator, long denominator);
  explicit Rational(const mpq_class& value);

  /// Parses `-?[0-9]+(/[1-9][0-9]*)?`. Anything else throws ParseError.
  static Rational parse(std::string_view text);

  /// "a/b", or "a" when the denominator is 1.
  std::string str() const;
  /// Decimal rendering with `digits` significant digits (report layer only).
  std::string decimal(int digits = 12) const;
  double to_double() const { return value_.get_d(); }

  mpz_class numerator() const { return value_.get_num(); }
  mpz_class denominator() const { return value_.get_den(); }
  const mpq_class& raw() const noexcept { return value_; }

  int sign() const { return sgn(value_); }
  bool is_zero() const { return sign() == 0; }

  /// floor(value * 2^bits), clamped to [0, 2^bits]. Used to compare dyadic
  /// uniforms k/2^bits against this breakpoint with integer arithmetic only.
  std::uint64_t dyadic_floor(unsigned bits) const;

  Rational& operator+=(const Rational& rhs);
  Rational& operator-=(const Rational& rhs);
  Rational& operator*=(const Rational& rhs);
  Rational& operator/=(const Rational& rhs);

  friend Rational operator+(Rational lhs, const Rational& rhs) { return lhs += rhs; }
  friend Rational operator-(Rational lhs, const Rational& rhs) { return lhs -= rhs; }
  friend Rational operator*(Rational lhs, const Rational& rhs) { return lhs *= rhs; }
  friend Rational operator/(Rational lhs, const Rational& rhs) { return lhs /= rhs; }
  Rational operator-() const;

  friend bool operator==(const Rational& lhs, const Rational& rhs) { return lhs.value_ == rhs.value_; }
  friend std::strong_ordering operator<=>(const Rational& lhs, const Rational& rhs) {
    const int c = cmp(lhs.value_, rhs.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  mpq_class value_{0};
};

Rational abs(const Rational& value);

}  // namespace bell
