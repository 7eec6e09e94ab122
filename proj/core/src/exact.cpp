#include "conekit/exact.hpp"

#include <cmath>
#include <sstream>

#include "conekit/error.hpp"

namespace conekit::exact {

namespace {

using boost::multiprecision::denominator;
using boost::multiprecision::numerator;

// Largest s with s^2 | n found by trial division up to 10^5, plus a final
// perfect-square test on the cofactor.
std::pair<Integer, Integer> split_square(Integer n) {
  Integer square_root = 1;
  for (Integer p = 2; p <= 100000 && p * p <= n; ++p) {
    while (n % (p * p) == 0) {
      n /= p * p;
      square_root *= p;
    }
  }
  const Integer r = boost::multiprecision::sqrt(n);
  if (r * r == n) {
    square_root *= r;
    n = 1;
  }
  return {square_root, n};
}

std::strong_ordering sign_of(const Rational& r) {
  if (r > 0) return std::strong_ordering::greater;
  if (r < 0) return std::strong_ordering::less;
  return std::strong_ordering::equal;
}

// Sign of p + q sqrt(d) for rationals p, q and d > 0.
std::strong_ordering sign_with_root(const Rational& p, const Rational& q, const Integer& d) {
  const auto sp = sign_of(p);
  const auto sq = sign_of(q);
  if (sq == 0) return sp;
  if (sp == 0 || sp == sq) return sq;
  // Opposite signs: compare p^2 with q^2 d.
  const Rational lhs = p * p;
  const Rational rhs = q * q * Rational(d);
  if (lhs == rhs) return std::strong_ordering::equal;
  return lhs > rhs ? sp : sq;
}

}  // namespace

Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw ValidationError("cannot convert a non-finite value to a rational");
  int exponent = 0;
  const double mantissa = std::frexp(x, &exponent);
  const auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  Rational r = Rational(Integer(scaled));
  const int shift = exponent - 53;
  if (shift >= 0) {
    r *= Rational(Integer(1) << shift);
  } else {
    r /= Rational(Integer(1) << (-shift));
  }
  return r;
}

Rational rational_from_decimal(double x) {
  if (auto r = geometry::recover_rational(x, 1000000)) return rational_from(*r);
  return rational_from_double(x);
}

Rational rational_from(geometry::RationalValue r) { return Rational(Integer(r.num), Integer(r.den)); }

Quad to_quad(const Rational& r) { return Quad(numerator(r)) / Quad(denominator(r)); }

double to_double(const Rational& r) { return static_cast<double>(to_quad(r)); }

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << numerator(r);
  if (denominator(r) != 1) os << '/' << denominator(r);
  return os.str();
}

std::optional<Rational> exact_sqrt(const Rational& r) {
  if (r < 0) return std::nullopt;
  const Integer n = numerator(r);
  const Integer d = denominator(r);
  const Integer rn = boost::multiprecision::sqrt(n);
  const Integer rd = boost::multiprecision::sqrt(d);
  if (rn * rn == n && rd * rd == d) return Rational(rn, rd);
  return std::nullopt;
}

Surd::Surd(Rational a, Rational b, Integer d) : a_(std::move(a)), b_(std::move(b)), d_(std::move(d)) {
  if (b_ == 0 || d_ == 1) {
    if (d_ == 1) a_ += b_;
    b_ = 0;
    d_ = 1;
  }
}

Surd Surd::sqrt_of(const Rational& r) {
  if (r < 0) throw ValidationError("square root of a negative rational");
  if (r == 0) return Surd();
  // sqrt(p/q) = sqrt(p q) / q.
  const Integer p = numerator(r);
  const Integer q = denominator(r);
  const auto [outside, inside] = split_square(p * q);
  return Surd(Rational(0), Rational(outside, q), inside);
}

Surd Surd::operator-() const { return Surd(-a_, -b_, d_); }

Surd Surd::operator+(const Rational& r) const { return Surd(a_ + r, b_, d_); }

Surd Surd::operator*(const Rational& r) const { return Surd(a_ * r, b_ * r, d_); }

std::strong_ordering Surd::compare(const Rational& r) const { return sign_with_root(a_ - r, b_, d_); }

std::strong_ordering Surd::compare(const Surd& other) const {
  if (other.is_rational()) return compare(other.a_);
  if (is_rational()) return 0 <=> other.compare(a_);
  if (d_ == other.d_) return sign_with_root(a_ - other.a_, b_ - other.b_, d_);
  const Quad diff = to_quad() - other.to_quad();
  return diff > 0 ? std::strong_ordering::greater : std::strong_ordering::less;
}

Quad Surd::to_quad() const {
  Quad v = exact::to_quad(a_);
  if (b_ != 0) v += exact::to_quad(b_) * boost::multiprecision::sqrt(Quad(d_));
  return v;
}

double Surd::to_double() const { return static_cast<double>(to_quad()); }

std::string Surd::str() const {
  if (is_rational()) return to_string(a_);
  std::ostringstream os;
  if (a_ != 0) os << to_string(a_) << (b_ > 0 ? "+" : "-");
  else if (b_ < 0) os << '-';
  const Rational mag = b_ < 0 ? Rational(-b_) : b_;
  if (mag != 1) os << to_string(mag) << '*';
  os << "sqrt(" << d_ << ')';
  return os.str();
}

std::string RealValue::str() const {
  if (exact_) return exact_->str();
  std::ostringstream os;
  os.precision(34);
  os << approx_;
  return os.str();
}

RealValue RealValue::operator+(const Rational& r) const {
  if (exact_) return RealValue(*exact_ + r);
  return RealValue(Quad(approx_ + to_quad(r)));
}

RealValue RealValue::operator-() const {
  if (exact_) return RealValue(-*exact_);
  return RealValue(Quad(-approx_));
}

std::strong_ordering RealValue::compare(const Rational& r) const {
  if (exact_) return exact_->compare(r);
  const Quad q = to_quad(r);
  if (approx_ == q) return std::strong_ordering::equal;
  return approx_ > q ? std::strong_ordering::greater : std::strong_ordering::less;
}

std::strong_ordering RealValue::compare(const RealValue& other) const {
  if (exact_ && other.exact_) return exact_->compare(*other.exact_);
  if (approx_ == other.approx_) return std::strong_ordering::equal;
  return approx_ > other.approx_ ? std::strong_ordering::greater : std::strong_ordering::less;
}

}  // namespace conekit::exact
