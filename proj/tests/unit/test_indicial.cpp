#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "conekit/error.hpp"
#include "conekit/indicial.hpp"
#include "oracles.hpp"

using namespace conekit;
using namespace conekit::indicial;
using conekit::exact::Rational;
using geometry::RationalValue;

namespace {

std::map<Rational, int> as_map(const std::vector<IndicialRoot>& roots, int mode) {
  std::map<Rational, int> out;
  for (const auto& r : roots) {
    if (r.mode != mode) continue;
    EXPECT_TRUE(r.value.is_exact());
    EXPECT_TRUE(r.value.exact()->is_rational());
    out[r.value.exact()->rational_part()] += r.multiplicity;
    EXPECT_EQ(r.log_power_max, r.multiplicity - 1);
  }
  return out;
}

std::vector<std::pair<int, Rational>> members(const AsymptoticSpace& space) {
  std::vector<std::pair<int, Rational>> out;
  for (const auto& m : space.members) out.emplace_back(m.mode, m.value.exact()->rational_part());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(GammaWindow, ChExamples) {
  const auto a = ch_gamma_window(1, -1.0);
  EXPECT_EQ(a.lower, -1.0);
  EXPECT_EQ(a.upper, -0.5);
  EXPECT_TRUE(a.nonempty);
  const auto b = ch_gamma_window(2, -2.0);
  EXPECT_EQ(b.lower, -0.5);
  EXPECT_EQ(b.upper, -0.25);
  const auto c = ch_gamma_window(2, -0.0);
  EXPECT_FALSE(c.nonempty);
  EXPECT_EQ(c.upper, -0.5);
  EXPECT_THROW(ch_gamma_window(3, -1.0), ValidationError);
  EXPECT_THROW(ch_gamma_window(1, 0.5), ValidationError);
}

TEST(GammaWindow, LaplacianExamples) {
  const auto a = laplacian_gamma_window(1, -1.0);
  EXPECT_EQ(a.lower, -1.0);
  EXPECT_EQ(a.upper, 0.0);
  const auto b = laplacian_gamma_window(1, -4.0);
  EXPECT_EQ(b.upper, 1.0);
  const auto c = laplacian_gamma_window(2, -2.0);
  EXPECT_EQ(c.lower, -0.5);
  EXPECT_EQ(c.upper, 0.5);
}

TEST(GammaWindow, ChInsideLaplacianForRandomLambda) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> dist(-25.0, 0.0);
  for (int i = 0; i < 1000; ++i) {
    const double lam = dist(rng);
    const auto ch = ch_gamma_window(1, lam);
    const auto lap = laplacian_gamma_window(1, lam);
    EXPECT_LE(ch.upper, lap.upper);
    EXPECT_GE(ch.lower, lap.lower);
    EXPECT_EQ(ch.nonempty, ch.lower < ch.upper);
  }
}

TEST(LaplacianRoots, Examples) {
  const auto zero = laplacian_indicial_roots(1, geometry::boundary_spectrum(1.0, 0));
  ASSERT_EQ(zero.size(), 1u);
  EXPECT_EQ(zero[0].value.compare(Rational(0)), std::strong_ordering::equal);
  EXPECT_EQ(zero[0].multiplicity, 2);
  EXPECT_EQ(zero[0].log_power_max, 1);

  const auto one = laplacian_indicial_roots(1, geometry::boundary_spectrum(1.0, 1));
  EXPECT_EQ(as_map(one, 1), (std::map<Rational, int>{{-1, 1}, {1, 1}}));

  const double lam[] = {0.0};
  const auto two = laplacian_indicial_roots(2, geometry::boundary_spectrum_from_eigenvalues(lam));
  EXPECT_EQ(as_map(two, 0), (std::map<Rational, int>{{-1, 1}, {0, 1}}));
}

TEST(LaplacianRoots, PairSumsToShift) {
  const double lam[] = {0.0, -2.0, -6.0, -3.5};
  for (int n : {1, 2, 3}) {
    const auto roots = laplacian_indicial_roots(n, geometry::boundary_spectrum_from_eigenvalues(lam));
    for (int mode = 0; mode < 4; ++mode) {
      std::vector<exact::Quad> vals;
      for (const auto& r : roots) {
        if (r.mode != mode) continue;
        for (int m = 0; m < r.multiplicity; ++m) vals.push_back(r.value.approx());
      }
      ASSERT_EQ(vals.size(), 2u);
      EXPECT_NEAR(static_cast<double>(vals[0] + vals[1]), -(n - 1.0), 1e-30);
    }
  }
}

TEST(BilaplacianRoots, Examples) {
  const auto c1 = bilaplacian_indicial_roots(1, geometry::boundary_spectrum(1.0, 1));
  EXPECT_EQ(as_map(c1, 1), (std::map<Rational, int>{{-1, 1}, {1, 2}, {3, 1}}));
  EXPECT_EQ(as_map(c1, 0), (std::map<Rational, int>{{0, 2}, {2, 2}}));
  const auto half = bilaplacian_indicial_roots(1, geometry::boundary_spectrum(RationalValue{1, 2}, 1));
  EXPECT_EQ(as_map(half, 1), (std::map<Rational, int>{{-2, 1}, {0, 1}, {2, 1}, {4, 1}}));
}

TEST(BilaplacianRoots, MatchPolynomialEnumeration) {
  for (RationalValue c : {RationalValue{1, 1}, RationalValue{1, 2}, RationalValue{1, 3}, RationalValue{2, 5}}) {
    const auto spec = geometry::boundary_spectrum(c, 6);
    const auto roots = bilaplacian_indicial_roots(1, spec);
    for (const auto& e : spec.entries) {
      const Rational lam = exact::rational_from(*e.exact);
      const conekit::testing::Poly p{lam, Rational(0), Rational(1)};  // z^2 + lambda
      const auto oracle = conekit::testing::rational_roots(conekit::testing::multiply(p, conekit::testing::shifted(p, Rational(2))));
      EXPECT_EQ(as_map(roots, e.mode), oracle) << "mode " << e.mode;
    }
  }
}

TEST(BilaplacianRoots, ReflectionSymmetryAndLogBound) {
  const double lam[] = {0.0, -2.0, -0.75, -12.0};
  for (int n : {1, 2}) {
    const auto roots = bilaplacian_indicial_roots(n, geometry::boundary_spectrum_from_eigenvalues(lam));
    for (int mode = 0; mode < 4; ++mode) {
      std::vector<double> vals, reflected;
      for (const auto& r : roots) {
        if (r.mode != mode) continue;
        EXPECT_LE(r.log_power_max, 3);
        for (int m = 0; m < r.multiplicity; ++m) {
          vals.push_back(r.real());
          reflected.push_back(2.0 - (n - 1.0) - r.real());
        }
      }
      std::sort(vals.begin(), vals.end());
      std::sort(reflected.begin(), reflected.end());
      ASSERT_EQ(vals.size(), 4u);
      for (int i = 0; i < 4; ++i) EXPECT_NEAR(vals[i], reflected[i], 1e-14);
    }
  }
}

TEST(AsymptoticSpace, UnitCone) {
  const auto spec = geometry::boundary_spectrum(1.0, 2);
  const auto a = asymptotic_space(1, spec, -0.75);
  EXPECT_EQ(a.lo, Rational(-9, 4));
  EXPECT_EQ(a.hi, Rational(-1, 4));
  EXPECT_EQ(members(a), (std::vector<std::pair<int, Rational>>{{1, -1}, {2, -2}}));
  const auto b = asymptotic_space(1, spec, -0.999);
  EXPECT_EQ(b.lo, Rational(-2001, 1000));
  EXPECT_EQ(b.hi, Rational(-1, 1000));
  EXPECT_EQ(members(b), (std::vector<std::pair<int, Rational>>{{1, -1}, {2, -2}}));
}

TEST(AsymptoticSpace, HigherModesAlsoEnter) {
  // Modes 3 and 4 contribute 2 - k = -1, -2.
  const auto a = asymptotic_space(1, geometry::boundary_spectrum(1.0, 4), -0.75);
  EXPECT_EQ(members(a), (std::vector<std::pair<int, Rational>>{{1, -1}, {2, -2}, {3, -1}, {4, -2}}));
}

TEST(AsymptoticSpace, ThreeTenthsOpeningKeepsShiftedRoot) {
  // Roots are +-10k/3 and 2 +- 10k/3; only 2 - 10/3 = -4/3 lies in [-9/4, -1/4).
  const auto a = asymptotic_space(1, geometry::boundary_spectrum(RationalValue{3, 10}, 6), -0.75);
  EXPECT_EQ(members(a), (std::vector<std::pair<int, Rational>>{{1, Rational(-4, 3)}}));
}

TEST(AsymptoticSpace, HalfOpenBoundaries) {
  // gamma = 0: window [-3, -1); -3 is kept and -1 is not.
  const auto a = asymptotic_space(1, geometry::boundary_spectrum(1.0, 3), 0.0);
  EXPECT_EQ(members(a), (std::vector<std::pair<int, Rational>>{{2, -2}, {3, -3}}));
}

TEST(AsymptoticSpace, WindowIsAffineInGamma) {
  const auto spec = geometry::boundary_spectrum(1.0, 2);
  for (double g1 : {-0.9, -0.6, 0.25}) {
    for (double g2 : {-0.8, -0.55, 1.5}) {
      const auto a = asymptotic_space(1, spec, g1);
      const auto b = asymptotic_space(1, spec, g2);
      const Rational dg = exact::rational_from_decimal(g2) - exact::rational_from_decimal(g1);
      EXPECT_EQ(b.lo - a.lo, -dg);
      EXPECT_EQ(b.hi - a.hi, -dg);
    }
  }
}

TEST(AsymptoticSpace, MembersAreRoots) {
  const auto spec = geometry::boundary_spectrum(RationalValue{1, 2}, 5);
  const auto roots = bilaplacian_indicial_roots(1, spec);
  for (double gamma : {-0.95, -0.75, -0.6, 0.3, -2.5}) {
    const auto space = asymptotic_space(1, spec, gamma);
    for (const auto& m : space.members) {
      EXPECT_TRUE(m.value.compare(space.lo) >= 0);
      EXPECT_TRUE(m.value.compare(space.hi) < 0);
      EXPECT_LE(m.log_power_max, 3);
      const bool found = std::any_of(roots.begin(), roots.end(), [&](const IndicialRoot& r) {
        return r.mode == m.mode && r.value == m.value;
      });
      EXPECT_TRUE(found);
    }
  }
}

TEST(MinimalDomain, Examples) {
  EXPECT_TRUE(minimal_domain_check(1, geometry::boundary_spectrum(1.0, 4), -0.75).holds);
  const auto bad = minimal_domain_check(1, geometry::boundary_spectrum(1.0, 4), 0.0);
  EXPECT_FALSE(bad.holds);
  ASSERT_FALSE(bad.offending.empty());
  EXPECT_EQ(bad.offending.front().value.compare(Rational(1)), std::strong_ordering::equal);
  EXPECT_EQ(bad.offending.front().mode, 1);
  EXPECT_TRUE(minimal_domain_check(1, geometry::boundary_spectrum(0.5, 4), -0.75).holds);
}

TEST(MinimalDomain, LaplacianAnalogue) {
  // (n-3)/2 - gamma = -1 - gamma hits -+k at gamma = 0 (k = 1) but not at -0.75.
  EXPECT_TRUE(laplacian_minimal_domain_check(1, geometry::boundary_spectrum(1.0, 3), -0.75).holds);
  EXPECT_FALSE(laplacian_minimal_domain_check(1, geometry::boundary_spectrum(1.0, 3), 0.0).holds);
}

TEST(InterpolationExclusions, Examples) {
  const auto a = interpolation_exclusions(1, geometry::boundary_spectrum(1.0, 4), -0.75);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_DOUBLE_EQ(a[0], 0.375);
  EXPECT_DOUBLE_EQ(a[1], 0.875);
  EXPECT_EQ(interpolation_exclusions(1, geometry::boundary_spectrum(1.0, 4), 0.0), std::vector<double>{0.5});
  const double lam[] = {0.0, -2.0};
  const auto c = interpolation_exclusions(2, geometry::boundary_spectrum_from_eigenvalues(lam), -0.3);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_NEAR(c[0], 0.4, 1e-15);
  EXPECT_NEAR(c[1], 0.9, 1e-15);
}

TEST(Report, ConventionAndWindows) {
  const auto spec = geometry::boundary_spectrum(1.0, 2);
  const auto rep = indicial_report(1, spec, -0.75, ExponentConvention::decay_exponent);
  EXPECT_TRUE(rep.exact);
  EXPECT_EQ(rep.ch_window.upper, -0.5);
  EXPECT_EQ(rep.laplacian_window.upper, 0.0);
  ASSERT_FALSE(rep.asymptotics.members.empty());
  const auto& m = rep.asymptotics.members.front();
  EXPECT_EQ(m.in_convention(rep.convention), -m.value);
  const auto rep3 = indicial_report(3, spec, 0.0);
  EXPECT_FALSE(rep3.ch_window.nonempty);
}
