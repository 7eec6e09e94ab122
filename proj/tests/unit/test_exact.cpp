#include <gtest/gtest.h>

#include "conekit/exact.hpp"

using namespace conekit::exact;

TEST(Rational, FromDecimal) {
  EXPECT_EQ(rational_from_decimal(-0.75), Rational(-3, 4));
  EXPECT_EQ(rational_from_decimal(0.1), Rational(1, 10));
  EXPECT_EQ(rational_from_decimal(1.0 / 3.0), Rational(1, 3));
  EXPECT_NE(rational_from_double(0.1), Rational(1, 10));
  EXPECT_EQ(to_double(rational_from_double(0.1)), 0.1);
}

TEST(Rational, ExactSqrt) {
  EXPECT_EQ(*exact_sqrt(Rational(9, 4)), Rational(3, 2));
  EXPECT_FALSE(exact_sqrt(Rational(2)).has_value());
  EXPECT_FALSE(exact_sqrt(Rational(-4)).has_value());
}

TEST(Surd, Normalisation) {
  const Surd s = Surd::sqrt_of(Rational(8));
  EXPECT_EQ(s.surd_coefficient(), Rational(2));
  EXPECT_EQ(s.radicand(), Integer(2));
  EXPECT_EQ(s.str(), "2*sqrt(2)");
  const Surd r = Surd::sqrt_of(Rational(25, 9));
  EXPECT_TRUE(r.is_rational());
  EXPECT_EQ(r.rational_part(), Rational(5, 3));
  const Surd q = Surd::sqrt_of(Rational(1, 2));
  EXPECT_EQ(q.surd_coefficient(), Rational(1, 2));
  EXPECT_EQ(q.radicand(), Integer(2));
}

TEST(Surd, ArithmeticAndOrdering) {
  const Surd a = Surd::sqrt_of(Rational(5)) * Rational(3) + Rational(1, 2);
  EXPECT_EQ(a.str(), "1/2+3*sqrt(5)");
  EXPECT_EQ((-a).compare(Rational(0)), std::strong_ordering::less);
  EXPECT_EQ(Surd::sqrt_of(Rational(2)).compare(Rational(141421, 100000)), std::strong_ordering::greater);
  EXPECT_EQ(Surd::sqrt_of(Rational(2)).compare(Rational(141422, 100000)), std::strong_ordering::less);
  EXPECT_EQ(Surd::sqrt_of(Rational(2)).compare(Surd::sqrt_of(Rational(3))), std::strong_ordering::less);
  EXPECT_EQ(Surd::sqrt_of(Rational(8)), Surd::sqrt_of(Rational(2)) * Rational(2));
  EXPECT_NEAR(a.to_double(), 0.5 + 3 * std::sqrt(5.0), 1e-15);
}

TEST(RealValue, MixedComparison) {
  const RealValue exact_one(Surd(Rational(1)));
  const RealValue approx_one(Quad(1));
  EXPECT_TRUE(exact_one.is_exact());
  EXPECT_FALSE(approx_one.is_exact());
  EXPECT_EQ(exact_one, approx_one);
  EXPECT_EQ((exact_one + Rational(1)).compare(Rational(2)), std::strong_ordering::equal);
  EXPECT_EQ((-exact_one).compare(Rational(0)), std::strong_ordering::less);
}
