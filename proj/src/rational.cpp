#include "bell/rational.hpp"

#include <cstdio>
#include <regex>
#include <vector>

#include "bell/errors.hpp"

namespace bell {

Rational::Rational(long numerator, long denominator) {
  if (denominator == 0) throw InvalidArgument("rational with zero denominator");
  value_ = mpq_class(numerator, denominator);
  value_.canonicalize();
}

Rational::Rational(const mpq_class& value) : value_(value) { value_.canonicalize(); }

Rational Rational::parse(std::string_view text) {
  static const std::regex pattern("-?[0-9]+(/[1-9][0-9]*)?");
  const std::string s(text);
  if (!std::regex_match(s, pattern)) {
    throw ParseError("not a rational string: \"" + s + "\"");
  }
  Rational r;
  if (r.value_.set_str(s, 10) != 0) throw ParseError("not a rational string: \"" + s + "\"");
  r.value_.canonicalize();
  return r;
}

std::string Rational::str() const {
  if (value_.get_den() == 1) return value_.get_num().get_str();
  return value_.get_str();
}

std::string Rational::decimal(int digits) const {
  mpf_class f(value_, 256);
  std::vector<char> buf(static_cast<std::size_t>(digits) + 64);
  for (;;) {
    const int n = gmp_snprintf(buf.data(), buf.size(), "%.*Fg", digits, f.get_mpf_t());
    if (n >= 0 && static_cast<std::size_t>(n) < buf.size()) return std::string(buf.data(), static_cast<std::size_t>(n));
    buf.resize(buf.size() * 2);
  }
}

std::uint64_t Rational::dyadic_floor(unsigned bits) const {
  if (bits > 63) throw InvalidArgument("dyadic_floor supports at most 63 bits");
  const mpz_class scale = mpz_class(1) << bits;
  if (sign() <= 0) return 0;
  mpz_class scaled = value_.get_num() * scale;
  mpz_fdiv_q(scaled.get_mpz_t(), scaled.get_mpz_t(), value_.get_den_mpz_t());
  if (scaled > scale) scaled = scale;
  return static_cast<std::uint64_t>(mpz_get_ui(scaled.get_mpz_t()));
}

Rational& Rational::operator+=(const Rational& rhs) {
  value_ += rhs.value_;
  return *this;
}

Rational& Rational::operator-=(const Rational& rhs) {
  value_ -= rhs.value_;
  return *this;
}

Rational& Rational::operator*=(const Rational& rhs) {
  value_ *= rhs.value_;
  return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
  if (rhs.is_zero()) throw InvalidArgument("division by zero rational");
  value_ /= rhs.value_;
  return *this;
}

Rational Rational::operator-() const {
  Rational r;
  r.value_ = -value_;
  return r;
}

Rational abs(const Rational& value) { return value.sign() < 0 ? -value : value; }

}  // namespace bell
