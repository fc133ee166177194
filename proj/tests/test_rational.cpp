#include "bell/rational.hpp"

#include <gtest/gtest.h>

#include "bell/errors.hpp"
#include "bell/rng.hpp"

using bell::Rational;

TEST(rational, canonical_form) {
  const Rational r(6, -8);
  EXPECT_EQ(r.str(), "-3/4");
  EXPECT_EQ(r.denominator(), 4);
  EXPECT_EQ(Rational::parse("10/4").str(), "5/2");
  EXPECT_EQ(Rational::parse("-0").str(), "0");
  EXPECT_EQ(Rational::parse("7").str(), "7");
  EXPECT_EQ(Rational::parse("4/2"), Rational(2));
}

TEST(rational, rejects_malformed_strings) {
  for (const char* bad : {"", "1/0", "1/-2", "+1", "1.5", "1/02", " 1", "a/b", "1/", "/2", "--1"}) {
    EXPECT_THROW(Rational::parse(bad), bell::ParseError) << bad;
  }
}

TEST(rational, arbitrary_precision) {
  Rational r(1);
  for (int i = 0; i < 200; ++i) r *= Rational(3, 2);
  for (int i = 0; i < 200; ++i) r /= Rational(3, 2);
  EXPECT_EQ(r, Rational(1));
  const auto big = Rational::parse("123456789012345678901234567890/7");
  EXPECT_EQ(Rational::parse(big.str()), big);
}

TEST(rational, serialize_parse_round_trip_property) {
  bell::Rng rng(99);
  for (int i = 0; i < 2000; ++i) {
    const auto num = static_cast<long>(rng.below(2'000'001)) - 1'000'000;
    const auto den = static_cast<long>(1 + rng.below(1'000'000));
    Rational r(num, den);
    for (std::uint64_t k = rng.below(4); k > 0; --k) r *= r;
    const auto back = Rational::parse(r.str());
    EXPECT_EQ(back, r);
    EXPECT_EQ(back.str(), r.str());
  }
}

TEST(rational, ordering_and_arithmetic) {
  EXPECT_LT(Rational(1, 3), Rational(1, 2));
  EXPECT_EQ(Rational(1, 3) + Rational(1, 6), Rational(1, 2));
  EXPECT_EQ(abs(Rational(-7, 10)), Rational(7, 10));
  EXPECT_THROW(Rational(1) / Rational(0), bell::InvalidArgument);
  EXPECT_THROW(Rational(1, 0), bell::InvalidArgument);
}

TEST(rational, decimal_rendering) {
  EXPECT_EQ(Rational(14, 5).decimal(), "2.8");
  EXPECT_EQ(Rational(1, 3).decimal(), "0.333333333333");
  EXPECT_EQ(Rational(2, 3).decimal(), "0.666666666667");
}

TEST(rational, dyadic_floor) {
  EXPECT_EQ(Rational(3, 4).dyadic_floor(53), std::uint64_t{3} << 51);
  EXPECT_EQ(Rational(1).dyadic_floor(53), std::uint64_t{1} << 53);
  EXPECT_EQ(Rational(0).dyadic_floor(53), 0U);
  EXPECT_EQ(Rational(1, 3).dyadic_floor(2), 1U);  // floor(4/3)
}
