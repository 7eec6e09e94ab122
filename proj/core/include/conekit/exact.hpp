#pragma once

// Exact arithmetic for indicial bookkeeping: arbitrary-precision rationals and
// real quadratic surds a + b sqrt(d), with quad-precision floats as fallback.

#include <compare>
#include <optional>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "conekit/geometry.hpp"

namespace conekit::exact {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Quad = boost::multiprecision::cpp_bin_float_quad;

/// The exact binary value of a double.
Rational rational_from_double(double x);
/// Small rational p/q reproducing x when one exists (denominator <= 10^6),
/// otherwise the exact binary value.
Rational rational_from_decimal(double x);
Rational rational_from(geometry::RationalValue r);

Quad to_quad(const Rational& r);
double to_double(const Rational& r);
std::string to_string(const Rational& r);

/// sqrt(r) when r >= 0 is the square of a rational.
std::optional<Rational> exact_sqrt(const Rational& r);

/// a + b sqrt(d) with d a square-free integer > 1, or b = 0 (then d = 1).
class Surd {
 public:
  Surd() = default;
  explicit Surd(Rational a) : a_(std::move(a)) {}
  /// sqrt(r) for rational r >= 0, reduced to a square-free radicand.
  static Surd sqrt_of(const Rational& r);

  const Rational& rational_part() const noexcept { return a_; }
  const Rational& surd_coefficient() const noexcept { return b_; }
  const Integer& radicand() const noexcept { return d_; }
  bool is_rational() const noexcept { return b_ == 0; }

  Surd operator-() const;
  Surd operator+(const Rational& r) const;
  Surd operator-(const Rational& r) const { return *this + Rational(-r); }
  Surd operator*(const Rational& r) const;

  /// Exact three-way comparison against a rational.
  std::strong_ordering compare(const Rational& r) const;
  /// Exact when both share a radicand (or one is rational); otherwise the two
  /// values are provably distinct and quad precision decides the order.
  std::strong_ordering compare(const Surd& other) const;

  friend bool operator==(const Surd& x, const Surd& y) {
    return x.a_ == y.a_ && x.b_ == y.b_ && x.d_ == y.d_;
  }

  Quad to_quad() const;
  double to_double() const;
  std::string str() const;

 private:
  Surd(Rational a, Rational b, Integer d);
  Rational a_ = 0;
  Rational b_ = 0;
  Integer d_ = 1;
};

/// A real number known either exactly (surd) or to quad precision.
class RealValue {
 public:
  RealValue() = default;
  explicit RealValue(Surd s) : exact_(std::move(s)), approx_(exact_->to_quad()) {}
  explicit RealValue(Quad q) : approx_(std::move(q)) {}

  bool is_exact() const noexcept { return exact_.has_value(); }
  const std::optional<Surd>& exact() const noexcept { return exact_; }
  const Quad& approx() const noexcept { return approx_; }
  double to_double() const { return static_cast<double>(approx_); }
  std::string str() const;

  RealValue operator+(const Rational& r) const;
  RealValue operator-() const;

  std::strong_ordering compare(const Rational& r) const;
  std::strong_ordering compare(const RealValue& other) const;
  friend bool operator==(const RealValue& x, const RealValue& y) { return x.compare(y) == 0; }

 private:
  std::optional<Surd> exact_;
  Quad approx_ = 0;
};

}  // namespace conekit::exact
