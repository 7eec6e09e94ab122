#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "conekit/cone_operators.hpp"
#include "conekit/error.hpp"
#include "conekit/spaces.hpp"
#include "support.hpp"

using namespace conekit;
using namespace conekit::ops;
using conekit::testing::cone_mesh;
using conekit::testing::loglog_slope;
using conekit::testing::random_field;
using conekit::testing::sphere_mesh;

namespace {

std::vector<double> random_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = normal(rng);
  return v;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double rel_diff(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return num / den;
}

double min_width(const geometry::RadialMesh& mesh) {
  double w = mesh.length();
  for (int i = 0; i < mesh.size(); ++i) w = std::min(w, mesh.width(i));
  return w;
}

}  // namespace

TEST(ModeOperator, ConstantsInKernel) {
  for (const auto& mesh : {sphere_mesh(128, 0.85), cone_mesh(0.5, 2.0, 128)}) {
    const auto op = assemble_mode_operator(mesh, 0);
    const std::vector<double> one(static_cast<std::size_t>(mesh->size()), 1.0);
    const double h = min_width(*mesh);
    EXPECT_LE(max_abs(op.apply(one)), 1e-12 / (h * h));
  }
}

TEST(ModeOperator, VolumeWeightedSymmetry) {
  const auto mesh = cone_mesh(0.5, 2.0, 64);
  for (int k : {0, 1, 3}) {
    const auto op = assemble_mode_operator(mesh, k);
    const auto& vol = mesh->volumes();
    for (int i = 0; i + 1 < op.size(); ++i) {
      EXPECT_NEAR(vol[i] * op.super()[i], vol[i + 1] * op.sub()[i + 1],
                  1e-14 * std::abs(vol[i] * op.super()[i]));
    }
  }
}

TEST(ModeOperator, SelfAdjointAndNegativeSemidefinite) {
  const auto mesh = cone_mesh(0.5, 2.0, 96);
  for (int k = 0; k <= 6; ++k) {
    const auto op = assemble_mode_operator(mesh, k);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto u = random_vector(op.size(), 2 * seed + 1);
      const auto v = random_vector(op.size(), 2 * seed + 2);
      const auto lu = op.apply(u);
      const auto lv = op.apply(v);
      const double nu = vol_norm(*mesh, u), nv = vol_norm(*mesh, v);
      const double scale = std::max(vol_norm(*mesh, lu) * nv, vol_norm(*mesh, lv) * nu);
      EXPECT_LE(std::abs(vol_dot(*mesh, lu, v) - vol_dot(*mesh, u, lv)), 1e-12 * scale);
      EXPECT_LE(vol_dot(*mesh, lu, u), 1e-12 * nu * vol_norm(*mesh, lu));
    }
  }
}

TEST(ModeOperator, SphereZonalHarmonicSecondOrder) {
  std::vector<double> ms, errs;
  for (int m : {32, 64, 128, 256}) {
    const auto mesh = sphere_mesh(m, 1.0);
    const auto op = assemble_mode_operator(mesh, 0);
    std::vector<double> u(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) u[i] = std::cos(mesh->centers()[i]);
    const auto lu = op.apply(u);
    double err = 0.0;
    for (int i = 0; i < m; ++i) err = std::max(err, std::abs(lu[i] + 2.0 * u[i]));
    ms.push_back(m);
    errs.push_back(err);
  }
  const double order = -loglog_slope(ms, errs);
  EXPECT_GE(order, 1.8);
  EXPECT_LE(order, 2.2);
}

TEST(ModeOperator, ModelConeHarmonicIsExact) {
  // s cos(theta) solves the mode-1 equation on the c = 1 collar.
  const auto mesh = cone_mesh(1.0, 3.0, 90, 1.0);
  const auto op = assemble_mode_operator(mesh, 1);
  std::vector<double> u(mesh->centers());
  const auto lu = op.apply(u);
  for (int i = 0; i < mesh->size(); ++i) {
    if (mesh->faces()[i + 1] > 1.0 - 1e-12) break;
    EXPECT_NEAR(lu[i], 0.0, 1e-10 / mesh->centers()[i]);
  }
}

TEST(Laplacian, ConstantsAndEigenfunctions) {
  const auto mesh = cone_mesh(0.5, 2.0, 64, 1.0);
  const Field c = Field::constant(mesh, 3, 4.0);
  for (double x : apply_laplacian(c).data()) EXPECT_NEAR(x, 0.0, 1e-12 * 4.0 / std::pow(min_width(*mesh), 2));
  for (double x : apply_bilaplacian(c).data()) EXPECT_NEAR(x, 0.0, 1e-9 * 4.0 / std::pow(min_width(*mesh), 4));

  for (int k : {0, 2}) {
    const auto sys = eigendecompose_mode(mesh, k);
    for (int j : {1, 5, 20}) {
      Field phi(mesh, 3);
      const auto v = sys.vector(j);
      std::copy(v.begin(), v.end(), phi.component(Field::cos_component(k)).begin());
      const double mu = sys.values[j];
      const Field lp = apply_laplacian(phi);
      const Field llp = apply_bilaplacian(phi);
      std::vector<double> e1(v.begin(), v.end()), e2(v.begin(), v.end());
      for (double& x : e1) x *= -mu;
      for (double& x : e2) x *= mu * mu;
      EXPECT_LE(rel_diff(lp.component(Field::cos_component(k)), e1), 1e-9);
      EXPECT_LE(rel_diff(llp.component(Field::cos_component(k)), e2), 1e-9);
    }
  }
}

TEST(Laplacian, EigenResidualOnGradedMesh) {
  // Eigenvectors carry a backward error of order eps ||L||; the tip cells set ||L||.
  const auto mesh = cone_mesh(0.5, 2.0, 64);
  const double norm_l = 8.0 / std::pow(min_width(*mesh), 2);
  for (int k : {0, 2}) {
    const auto sys = eigendecompose_mode(mesh, k);
    for (int j : {1, 5, 20}) {
      Field phi(mesh, 3);
      const auto v = sys.vector(j);
      std::copy(v.begin(), v.end(), phi.component(Field::cos_component(k)).begin());
      const Field lp = apply_laplacian(phi);
      std::vector<double> r(v.begin(), v.end());
      const auto lpk = lp.component(Field::cos_component(k));
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = lpk[i] + sys.values[j] * v[i];
      EXPECT_LE(vol_norm(*mesh, r), 1e3 * 2.2e-16 * norm_l * vol_norm(*mesh, v));
    }
  }
}

TEST(Laplacian, Linearity) {
  const auto mesh = sphere_mesh(64, 0.85);
  const Field u = random_field(mesh, 4, 11);
  const Field v = random_field(mesh, 4, 12);
  const Field lhs = apply_laplacian(2.0 * u - 3.0 * v);
  const Field rhs = 2.0 * apply_laplacian(u) - 3.0 * apply_laplacian(v);
  EXPECT_LE(rel_diff(lhs.data(), rhs.data()), 1e-12);
}

TEST(GaussIdentity, DefectWithinBound) {
  const auto mesh = cone_mesh(0.5, 2.0, 128);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Field u = random_field(mesh, 4, seed);
    EXPECT_LE(discrete_gauss_defect(u), gauss_defect_bound(u));
  }
  const Field rough = Field::radial_mode(mesh, 0, 0, false, [](double s) { return std::pow(s, 0.3); });
  EXPECT_LE(discrete_gauss_defect(rough), gauss_defect_bound(rough));
  EXPECT_EQ(discrete_gauss_defect(Field::constant(mesh, 2, 1.0)), 0.0);
}

TEST(Helmholtz, IdentityAndEigenOracle) {
  const auto mesh = cone_mesh(0.5, 2.0, 96);
  for (int k : {0, 1, 4}) {
    const auto op = assemble_mode_operator(mesh, k);
    const auto rhs = random_vector(op.size(), 7 + k);
    EXPECT_EQ(solve_helmholtz(op, 1.0, 0.0, rhs), rhs);

    const auto sys = eigendecompose_mode(op);
    for (int j : {0, 3, 30}) {
      const auto phi = sys.vector(j);
      const auto u = solve_helmholtz(op, 1.0, 1.0, phi);
      std::vector<double> expect(phi.begin(), phi.end());
      for (double& x : expect) x /= 1.0 + sys.values[j];
      EXPECT_LE(rel_diff(u, expect), 1e-9);
    }
  }
}

TEST(Helmholtz, SingularSystemNeedsZeroMean) {
  const auto mesh = cone_mesh(0.5, 2.0, 64);
  const auto op = assemble_mode_operator(mesh, 0);
  const std::vector<double> one(static_cast<std::size_t>(op.size()), 1.0);
  try {
    solve_helmholtz(op, 0.0, 1.0, one);
    FAIL() << "expected IncompatibleRhsError";
  } catch (const IncompatibleRhsError& e) {
    EXPECT_NE(std::string(e.what()).find("zero"), std::string::npos) << e.what();
  }
  // A compatible right-hand side gives the mean-zero solution.
  const auto sys = eigendecompose_mode(op);
  const auto phi = sys.vector(2);
  const auto u = solve_helmholtz(op, 0.0, 1.0, phi);
  std::vector<double> expect(phi.begin(), phi.end());
  for (double& x : expect) x /= sys.values[2];
  EXPECT_LE(rel_diff(u, expect), 1e-9);
  EXPECT_NEAR(vol_dot(*mesh, u, one), 0.0, 1e-10 * vol_norm(*mesh, u) * vol_norm(*mesh, one));
}

TEST(ChSystem, ConstantsPassThrough) {
  const auto mesh = sphere_mesh(64, 0.85);
  const auto op = assemble_mode_operator(mesh, 0);
  const std::vector<double> c(static_cast<std::size_t>(op.size()), 2.5);
  for (double x : solve_ch_system(op, 1e-3, 2.0, c)) EXPECT_NEAR(x, 2.5, 1e-9);
}

TEST(ChSystem, EigenOracleAndResidual) {
  const auto mesh = cone_mesh(0.5, 2.0, 128);
  for (int k : {0, 1, 5}) {
    const auto op = assemble_mode_operator(mesh, k);
    const auto sys = eigendecompose_mode(op);
    const double dt = 1e-3, S = 2.0;
    for (int j : {0, 4, 40}) {
      const double mu = sys.values[j];
      const auto phi = sys.vector(j);
      const auto u = solve_ch_system(op, dt, S, phi);
      std::vector<double> expect(phi.begin(), phi.end());
      for (double& x : expect) x /= 1.0 + dt * mu * mu + S * dt * mu;
      EXPECT_LE(rel_diff(u, expect), 1e-9);
    }
    // Graded tip cells put the k = 0 system far beyond 1e10 in condition; only the
    // backward error is meaningful there.
    const auto rhs = random_vector(op.size(), 99);
    const ChSystem ch(op, dt, S);
    const auto u = ch.solve(rhs);
    const auto [res, scale] = ch.residual(u, rhs);
    EXPECT_LE(res, 1e-14 * scale);
    EXPECT_GT(scale, 0.0);
  }
}

TEST(ChSystem, ResidualRelativeToRhs) {
  const auto mesh = cone_mesh(0.5, 2.0, 128, 1.0);
  for (int k : {0, 1, 5}) {
    const auto op = assemble_mode_operator(mesh, k);
    const auto rhs = random_vector(op.size(), 99);
    const ChSystem ch(op, 1e-3, 2.0);
    const auto u = ch.solve(rhs);
    EXPECT_LE(ch.residual(u, rhs).first, 1e-10 * vol_norm(*mesh, rhs)) << k;
  }
}

TEST(ChSystem, SmallStepPerturbsIdentity) {
  const auto mesh = sphere_mesh(64, 1.0);
  const auto op = assemble_mode_operator(mesh, 1);
  std::vector<double> rhs(static_cast<std::size_t>(op.size()));
  for (int i = 0; i < op.size(); ++i) rhs[i] = std::sin(mesh->centers()[i]);
  std::vector<double> dts, errs;
  for (double dt : {1e-4, 1e-5, 1e-6}) {
    const auto u = solve_ch_system(op, dt, 2.0, rhs);
    std::vector<double> d(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) d[i] = u[i] - rhs[i];
    dts.push_back(dt);
    errs.push_back(vol_norm(*mesh, d));
  }
  EXPECT_NEAR(loglog_slope(dts, errs), 1.0, 0.05);
}

TEST(Eigensystem, KernelOnlyInModeZero) {
  const auto mesh = cone_mesh(0.5, 2.0, 64);
  const auto s0 = eigendecompose_mode(mesh, 0);
  EXPECT_NEAR(s0.values[0], 0.0, 1e-9);
  const auto v0 = s0.vector(0);
  for (double x : v0) EXPECT_NEAR(x, v0[0], 1e-9 * std::abs(v0[0]));
  EXPECT_GT(s0.values[1], 1e-3);
  for (int k = 1; k <= 3; ++k) EXPECT_GT(eigendecompose_mode(mesh, k).values[0], 1e-3);
}

TEST(Eigensystem, Orthonormal) {
  const auto mesh = cone_mesh(0.5, 2.0, 128);
  for (int k : {0, 2}) {
    const auto sys = eigendecompose_mode(mesh, k);
    double defect = 0.0;
    for (int a = 0; a < sys.size; ++a) {
      for (int b = a; b < sys.size; ++b) {
        const double g = vol_dot(*mesh, sys.vector(a), sys.vector(b));
        defect = std::max(defect, std::abs(g - (a == b ? 1.0 : 0.0)));
      }
    }
    EXPECT_LE(defect, 1e-10);
  }
}

TEST(Eigensystem, SphereSpectrumMatchesSphericalHarmonics) {
  const auto mesh = sphere_mesh(256);
  const ModeSpectra spectra(mesh, 4);
  const auto pooled = spectra.pooled(25);
  std::vector<double> expect;
  for (int l = 0; l <= 4; ++l) {
    for (int m = 0; m < 2 * l + 1; ++m) expect.push_back(l * (l + 1.0));
  }
  ASSERT_EQ(pooled.size(), expect.size());
  EXPECT_NEAR(pooled[0], 0.0, 1e-9);
  for (std::size_t i = 1; i < expect.size(); ++i) EXPECT_NEAR(pooled[i] / expect[i], 1.0, 1e-2) << i;
}

TEST(FractionalPower, IdentityAndSquare) {
  const auto mesh = cone_mesh(0.5, 2.0, 64);
  const ModeSpectra spectra(mesh, 3);
  const Field u = random_field(mesh, 3, 5);
  EXPECT_LE(rel_diff(fractional_power_apply(0.0, u, spectra).data(), u.data()), 1e-10);
  // (1 - Delta)^2 u = u - 2 Delta u + Delta^2 u.
  const Field direct = u - 2.0 * apply_laplacian(u) + apply_bilaplacian(u);
  EXPECT_LE(rel_diff(spectra.fractional_power(1.0, u).data(), direct.data()), 1e-8);
}

TEST(FractionalPower, SemigroupProperty) {
  // Mixed-sign pairs amplify roundoff by (1 + mu_max)^2; a uniform sphere keeps that small.
  const auto mesh = sphere_mesh(64, 1.0);
  const ModeSpectra spectra(mesh, 3);
  const Field u = random_field(mesh, 3, 6);
  for (auto [a, b] : {std::pair{0.25, 0.5}, std::pair{-0.5, 1.0}, std::pair{1.0, -1.0}}) {
    const Field ab = spectra.fractional_power(a, spectra.fractional_power(b, u));
    const Field direct = spectra.fractional_power(a + b, u);
    EXPECT_LE(rel_diff(ab.data(), direct.data()), 1e-9);
  }
}

TEST(FractionalPower, SemigroupDecayBound) {
  const auto mesh = sphere_mesh(64, 0.85);
  const ModeSpectra spectra(mesh, 4);
  const auto mus = spectra.pooled(40);
  std::vector<double> times;
  for (int j = 0; j <= 300; ++j) times.push_back(0.01 * std::pow(1000.0, j / 300.0));
  for (double alpha : {0.25, 0.5, 1.0, 2.0}) {
    const double sup = semigroup_decay_sup(alpha, 1.0, mus, times);
    // Brute-force maximum and the calculus bound sup_t t^a e^{-(lam - 1) t} lam^a.
    double brute = 0.0;
    for (double mu : mus) {
      const double lam = (1 + std::max(mu, 0.0)) * (1 + std::max(mu, 0.0));
      for (double t : times) brute = std::max(brute, std::pow(t, alpha) * std::pow(lam, alpha) * std::exp(-(lam - 1) * t));
    }
    EXPECT_NEAR(sup, brute, 1e-12 * brute);
    const double lam1 = std::pow(1 + mus[1], 2);
    const double c_alpha = std::max(std::pow(10.0, alpha),
                                    std::pow(alpha * lam1 / (lam1 - 1.0), alpha) * std::exp(-alpha));
    EXPECT_TRUE(std::isfinite(sup));
    EXPECT_LE(sup, c_alpha * (1 + 1e-12));
  }
}

TEST(DualNorm, InverseLaplacianBound) {
  const auto mesh = cone_mesh(0.5, 2.0, 64);
  const double mu1 = spaces::first_nonzero_eigenvalue(mesh, 3);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Field u = spaces::mean_projected(random_field(mesh, 3, 1000 + seed));
    const double ratio = spaces::h01_dual_norm(u) / spaces::h01_dual_norm(apply_laplacian(u));
    EXPECT_LE(ratio, 1.0 / mu1 + 1e-6);
  }
}
