#include "conekit/indicial.hpp"

#include <algorithm>
#include <cmath>

#include "conekit/error.hpp"

namespace conekit::indicial {

namespace {

using exact::Quad;
using exact::Rational;
using exact::RealValue;
using exact::Surd;

void require_dimension(int n) {
  if (n < 1) throw ValidationError("the tip dimension n must be at least 1");
}

Rational half_shift(int n) { return Rational(n - 1, 2); }

// sqrt(((n-1)/2)^2 - lambda), exact when lambda is.
RealValue branch_radius(int n, const geometry::BoundarySpectrum::Entry& e) {
  if (e.exact) {
    const Rational h = half_shift(n);
    return RealValue(Surd::sqrt_of(h * h - exact::rational_from(*e.exact)));
  }
  const Quad h = Quad(n - 1) / 2;
  return RealValue(Quad(boost::multiprecision::sqrt(h * h - Quad(e.lambda))));
}

struct Value {
  RealValue v;
  int count;
};

void add_merged(std::vector<Value>& values, const RealValue& v) {
  for (auto& existing : values) {
    if (existing.v == v) {
      ++existing.count;
      return;
    }
  }
  values.push_back({v, 1});
}

std::vector<Value> mode_roots(int n, const geometry::BoundarySpectrum::Entry& e, bool bilaplacian) {
  const RealValue r = branch_radius(n, e);
  const Rational shift = -half_shift(n);
  std::vector<Value> out;
  add_merged(out, r + shift);
  add_merged(out, (-r) + shift);
  if (bilaplacian) {
    add_merged(out, r + (shift + 2));
    add_merged(out, (-r) + (shift + 2));
  }
  std::sort(out.begin(), out.end(), [](const Value& a, const Value& b) { return a.v.compare(b.v) < 0; });
  return out;
}

std::vector<IndicialRoot> roots(int n, const geometry::BoundarySpectrum& spectrum, Operator op) {
  require_dimension(n);
  std::vector<IndicialRoot> out;
  for (const auto& e : spectrum.entries) {
    for (const auto& [v, count] : mode_roots(n, e, op == Operator::bilaplacian)) {
      IndicialRoot root;
      root.value = v;
      root.mode = e.mode;
      root.boundary_multiplicity = e.multiplicity;
      root.multiplicity = count;
      root.log_power_max = count - 1;
      root.op = op;
      out.push_back(std::move(root));
    }
  }
  return out;
}

Rational gamma_rational(double gamma) {
  if (!std::isfinite(gamma)) throw ValidationError("gamma must be finite");
  return exact::rational_from_decimal(gamma);
}

GammaWindow make_window(double lower, double upper) {
  GammaWindow w;
  w.lower = lower;
  w.upper = upper;
  w.nonempty = lower < upper;
  return w;
}

void require_lambda(double lambda_one) {
  if (!(lambda_one <= 0.0)) throw ValidationError("lambda_1 must be <= 0");
}

}  // namespace

std::string_view to_string(Operator op) { return op == Operator::laplacian ? "Delta" : "Delta^2"; }

std::string_view to_string(ExponentConvention convention) {
  return convention == ExponentConvention::solution_power ? "x^{+q}" : "x^{-rho}";
}

RealValue IndicialRoot::in_convention(ExponentConvention convention) const {
  return convention == ExponentConvention::solution_power ? value : -value;
}

GammaWindow ch_gamma_window(int n, double lambda_one) {
  if (n != 1 && n != 2) throw ValidationError("the CH window is defined for n in {1, 2}");
  require_lambda(lambda_one);
  const double dim = n + 1;
  const double h = (dim - 2.0) / 2.0;
  const double upper = std::min(-1.0 + std::sqrt(h * h - lambda_one), (dim - 4.0) / 4.0);
  return make_window((dim - 4.0) / 2.0, upper);
}

GammaWindow laplacian_gamma_window(int n, double lambda_one) {
  require_dimension(n);
  require_lambda(lambda_one);
  const double h = (n - 1.0) / 2.0;
  const double upper = std::min(-1.0 + std::sqrt(h * h - lambda_one), (n + 1.0) / 2.0);
  return make_window((n - 3.0) / 2.0, upper);
}

std::vector<IndicialRoot> laplacian_indicial_roots(int n, const geometry::BoundarySpectrum& spectrum) {
  return roots(n, spectrum, Operator::laplacian);
}

std::vector<IndicialRoot> bilaplacian_indicial_roots(int n, const geometry::BoundarySpectrum& spectrum) {
  return roots(n, spectrum, Operator::bilaplacian);
}

AsymptoticSpace asymptotic_space(int n, const geometry::BoundarySpectrum& spectrum, double gamma) {
  const Rational g = gamma_rational(gamma);
  AsymptoticSpace space;
  space.gamma = gamma;
  space.lo = Rational(n - 7, 2) - g;
  space.hi = Rational(n - 3, 2) - g;
  for (auto& root : bilaplacian_indicial_roots(n, spectrum)) {
    if (root.value.compare(space.lo) >= 0 && root.value.compare(space.hi) < 0) {
      space.members.push_back(std::move(root));
    }
  }
  return space;
}

DomainCheck minimal_domain_check(int n, const geometry::BoundarySpectrum& spectrum, double gamma) {
  require_dimension(n);
  const Rational g = gamma_rational(gamma);
  DomainCheck check;
  for (const Rational& probe : {Rational(g + 1), Rational(g + 3)}) {
    for (const auto& e : spectrum.entries) {
      const RealValue r = branch_radius(n, e);
      for (const RealValue& branch : {r, -r}) {
        if (branch.compare(probe) == 0) {
          check.offending.push_back({branch, e.mode});
          break;
        }
      }
    }
  }
  check.holds = check.offending.empty();
  return check;
}

DomainCheck laplacian_minimal_domain_check(int n, const geometry::BoundarySpectrum& spectrum,
                                           double gamma) {
  require_dimension(n);
  const Rational probe = Rational(n - 3, 2) - gamma_rational(gamma);
  DomainCheck check;
  for (const auto& e : spectrum.entries) {
    const RealValue r = branch_radius(n, e);
    for (const RealValue& branch : {r + half_shift(n), (-r) + half_shift(n)}) {
      if (branch.compare(probe) == 0) {
        check.offending.push_back({branch, e.mode});
        break;
      }
    }
  }
  check.holds = check.offending.empty();
  return check;
}

std::vector<double> interpolation_exclusions(int n, const geometry::BoundarySpectrum& spectrum,
                                             double gamma) {
  require_dimension(n);
  const Rational centre = (Rational(1) - gamma_rational(gamma)) / 2;
  std::vector<RealValue> hits;
  for (const auto& e : spectrum.entries) {
    const RealValue r = branch_radius(n, e);
    const RealValue half = r.is_exact() ? RealValue(*r.exact() * Rational(1, 2)) : RealValue(Quad(r.approx() / 2));
    for (const RealValue& v : {half + centre, (-half) + centre}) {
      if (v.compare(Rational(0)) > 0 && v.compare(Rational(1)) < 0) {
        if (std::none_of(hits.begin(), hits.end(), [&](const RealValue& h) { return h == v; })) {
          hits.push_back(v);
        }
      }
    }
  }
  std::sort(hits.begin(), hits.end(), [](const RealValue& a, const RealValue& b) { return a.compare(b) < 0; });
  std::vector<double> out;
  out.reserve(hits.size());
  for (const auto& h : hits) out.push_back(h.to_double());
  return out;
}

IndicialReport indicial_report(int n, const geometry::BoundarySpectrum& spectrum, double gamma,
                               ExponentConvention convention) {
  IndicialReport report;
  report.n = n;
  report.gamma = gamma;
  report.convention = convention;
  const double l1 = spectrum.lambda_one();
  if (n <= 2) report.ch_window = ch_gamma_window(n, l1);
  report.laplacian_window = laplacian_gamma_window(n, l1);
  report.laplacian_roots = laplacian_indicial_roots(n, spectrum);
  report.bilaplacian_roots = bilaplacian_indicial_roots(n, spectrum);
  report.asymptotics = asymptotic_space(n, spectrum, gamma);
  report.minimal_domain = minimal_domain_check(n, spectrum, gamma);
  report.laplacian_minimal_domain = laplacian_minimal_domain_check(n, spectrum, gamma);
  report.exclusions = interpolation_exclusions(n, spectrum, gamma);
  report.exact = spectrum.is_exact();
  return report;
}

}  // namespace conekit::indicial
