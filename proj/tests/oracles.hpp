#pragma once

// Rational root enumeration for integer-coefficient polynomials, used as an
// independent check on the indicial roots.

#include <algorithm>
#include <map>
#include <vector>

#include "conekit/exact.hpp"

namespace conekit::testing {

using exact::Integer;
using exact::Rational;

/// Coefficients ascending: c[0] + c[1] z + ...
using Poly = std::vector<Rational>;

inline Poly multiply(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

/// p(z - shift) for p given ascending.
inline Poly shifted(const Poly& p, const Rational& shift) {
  Poly out{Rational(0)};
  Poly power{Rational(1)};
  const Poly lin{-shift, Rational(1)};
  for (const auto& c : p) {
    Poly term = power;
    for (auto& t : term) t *= c;
    if (term.size() > out.size()) out.resize(term.size(), Rational(0));
    for (std::size_t i = 0; i < term.size(); ++i) out[i] += term[i];
    power = multiply(power, lin);
  }
  return out;
}

inline Rational evaluate(const Poly& p, const Rational& z) {
  Rational v = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * z + *it;
  return v;
}

/// Divides p by (z - r); p(r) must vanish.
inline Poly deflate(const Poly& p, const Rational& r) {
  Poly q(p.size() - 1, Rational(0));
  Rational carry = 0;
  for (std::size_t i = p.size() - 1; i > 0; --i) {
    carry = carry * r + p[i];
    q[i - 1] = carry;
  }
  return q;
}

inline std::vector<Integer> divisors(Integer n) {
  if (n < 0) n = -n;
  std::vector<Integer> d;
  for (Integer i = 1; i * i <= n; ++i) {
    if (n % i == 0) {
      d.push_back(i);
      if (i * i != n) d.push_back(n / i);
    }
  }
  return d;
}

/// All rational roots with multiplicity, by the rational root theorem.
inline std::map<Rational, int> rational_roots(Poly p) {
  std::map<Rational, int> roots;
  while (p.size() > 1) {
    if (p.front() == 0) {
      ++roots[Rational(0)];
      p.erase(p.begin());
      continue;
    }
    Integer lcm = 1;
    for (const auto& c : p) {
      const Integer den = boost::multiprecision::denominator(c);
      lcm = lcm / boost::multiprecision::gcd(lcm, den) * den;
    }
    const Integer a0 = boost::multiprecision::numerator(Rational(p.front() * lcm));
    const Integer an = boost::multiprecision::numerator(Rational(p.back() * lcm));
    bool found = false;
    for (const auto& num : divisors(a0)) {
      for (const auto& den : divisors(an)) {
        for (int sign : {1, -1}) {
          const Rational r(Integer(sign) * num, den);
          if (!found && evaluate(p, r) == 0) {
            ++roots[r];
            p = deflate(p, r);
            found = true;
          }
        }
      }
    }
    if (!found) break;
  }
  return roots;
}

}  // namespace conekit::testing
