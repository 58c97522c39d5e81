#include <gtest/gtest.h>

#include <sstream>

#include "fairdiv/rational.hpp"

using fairdiv::Error;
using fairdiv::ErrorCode;
using fairdiv::Rational;

TEST(Rational, ParsesIntegersFractionsAndDecimals) {
  EXPECT_EQ(Rational::parse("7"), Rational(7));
  EXPECT_EQ(Rational::parse("6/110"), Rational(3, 55));
  EXPECT_EQ(Rational::parse("-3/6"), Rational(-1, 2));
  EXPECT_EQ(Rational::parse("+4"), Rational(4));
  EXPECT_EQ(Rational::parse("0.25"), Rational(1, 4));
  EXPECT_EQ(Rational::parse("1.5"), Rational(3, 2));
  EXPECT_EQ(Rational::parse(".5"), Rational(1, 2));
  EXPECT_EQ(Rational::parse(" 2 "), Rational(2));
  EXPECT_EQ(Rational::parse("123456789012345678901234567890"),
            Rational(mpz_class("123456789012345678901234567890")));
}

TEST(Rational, RejectsMalformedInput) {
  for (const char* bad : {"", "abc", "1/", "/2", "1/0", "1.2.3", "1e5", "--1", "1/-2", "."}) {
    try {
      Rational::parse(bad);
      ADD_FAILURE() << "accepted '" << bad << "'";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::MalformedRational) << bad;
    }
  }
  EXPECT_THROW(Rational(1, 0), Error);
}

TEST(Rational, StaysCanonical) {
  Rational r(4, -8);
  EXPECT_EQ(r.numerator(), -1);
  EXPECT_EQ(r.denominator(), 2);
  EXPECT_EQ(r.str(), "-1/2");
  EXPECT_EQ(Rational(10, 5).str(), "2");
  EXPECT_EQ(Rational(10, 5).fraction_str(), "2/1");
  EXPECT_TRUE(Rational(0, 7).is_zero());
  EXPECT_EQ(Rational(0, 7).denominator(), 1);
}

TEST(Rational, Arithmetic) {
  Rational a(1, 3), b(1, 6);
  EXPECT_EQ(a + b, Rational(1, 2));
  EXPECT_EQ(a - b, Rational(1, 6));
  EXPECT_EQ(a * b, Rational(1, 18));
  EXPECT_EQ(a / b, Rational(2));
  EXPECT_EQ(-a, Rational(-1, 3));
  EXPECT_EQ(abs(Rational(-5, 2)), Rational(5, 2));
  EXPECT_THROW(a / Rational(0), Error);
}

TEST(Rational, OrdersExactly) {
  EXPECT_LT(Rational(1, 3), Rational(34, 100));
  EXPECT_GT(Rational(37, 110), Rational(1, 3));
  EXPECT_LT(Rational(-1), Rational(0));
  EXPECT_EQ(Rational(2, 4) <=> Rational(1, 2), std::strong_ordering::equal);
}

TEST(Rational, DecimalRounding) {
  EXPECT_EQ(Rational(23, 55).decimal(), "0.418182");
  EXPECT_EQ(Rational(1, 8).decimal(2), "0.13");
  EXPECT_EQ(Rational(-1, 8).decimal(2), "-0.13");
  EXPECT_EQ(Rational(2).decimal(), "2.000000");
  EXPECT_EQ(Rational(1, 3).decimal(0), "0");
  EXPECT_EQ(Rational(-1, 1000000000).decimal(), "0.000000");
  EXPECT_DOUBLE_EQ(Rational(3, 55).to_double(), 3.0 / 55.0);
}

TEST(Rational, Streams) {
  std::ostringstream os;
  os << Rational(37, 110) << ' ' << Rational(5);
  EXPECT_EQ(os.str(), "37/110 5");
}
