#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "conekit/analysis.hpp"
#include "conekit/error.hpp"
#include "support.hpp"

using namespace conekit;
using namespace conekit::analysis;
using conekit::testing::cone_mesh;
using conekit::testing::sphere_mesh;

namespace {

std::vector<TrajectoryPoint> exponential_trajectory(double (*clock)(double)) {
  std::vector<TrajectoryPoint> points;
  for (int i = 0; i <= 1500; ++i) {
    const double t = 0.01 * i;
    points.push_back({clock(t), std::exp(-2 * t), std::exp(-t)});
  }
  points.push_back({clock(15.5), 0.0, 0.0});
  return points;
}

}  // namespace

TEST(Lojasiewicz, SyntheticExponentialGivesOneHalf) {
  const auto points = exponential_trajectory([](double t) { return t; });
  const auto probe = lojasiewicz_probe(points);
  EXPECT_NEAR(probe.theta, 0.5, 1e-3);
  EXPECT_NEAR(probe.slope, 0.5, 1e-3);
  EXPECT_TRUE(probe.within_bound);
  EXPECT_EQ(probe.energy_limit, 0.0);
  EXPECT_GE(probe.samples.size(), 10u);
}

TEST(Lojasiewicz, InvariantUnderTimeReparameterisation) {
  const auto a = lojasiewicz_probe(exponential_trajectory([](double t) { return t; }));
  const auto b = lojasiewicz_probe(exponential_trajectory([](double t) { return t * t + 3.0; }));
  EXPECT_EQ(a.theta, b.theta);
  EXPECT_EQ(a.r_squared, b.r_squared);
}

TEST(Lojasiewicz, ConstantTrajectoryRejected) {
  std::vector<TrajectoryPoint> points(200, TrajectoryPoint{0.0, -1.0, 0.0});
  for (std::size_t i = 0; i < points.size(); ++i) points[i].t = static_cast<double>(i);
  try {
    lojasiewicz_probe(points);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("insufficient decay range"), std::string::npos);
  }
}

TEST(TipFit, ExactPowerLaws) {
  const double c = 0.5;
  const auto mesh = cone_mesh(c, 2.0, 256, 0.8);
  for (int k : {1, 2}) {
    const double rho = k / c;
    const Field u = Field::radial_mode(mesh, 2, k, k == 2, [&](double s) { return std::pow(s, rho); });
    const auto fit = fit_tip_asymptotics(u, k);
    EXPECT_FALSE(fit.empty);
    EXPECT_NEAR(fit.rho, rho, 1e-6);
    EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
    EXPECT_GE(fit.window.s_a, mesh->min_center());
    EXPECT_LE(fit.window.s_b, 0.2 * mesh->length());
    const auto scaled = fit_tip_asymptotics(-3.7 * u, k);
    EXPECT_NEAR(scaled.rho, fit.rho, 1e-12);
  }
}

TEST(TipFit, LogBranchCoefficient) {
  const auto mesh = cone_mesh(1.0, 1.0, 128, 0.8);
  const Field u = Field::radial_mode(mesh, 1, 0, false, [](double s) { return 2.0 + 0.5 * std::log(s); });
  const auto fit = fit_tip_asymptotics(u, 0);
  EXPECT_NEAR(fit.log_coefficient, 0.5, 1e-10);
  EXPECT_NEAR(fit.intercept, 2.0, 1e-10);
}

TEST(TipFit, AbsentModeAndBadWindow) {
  const auto mesh = cone_mesh(1.0, 1.0, 64);
  const Field u = Field::radial_mode(mesh, 2, 1, false, [](double s) { return s; });
  const auto fit = fit_tip_asymptotics(u, 2);
  EXPECT_TRUE(fit.empty);
  EXPECT_EQ(fit.message, "mode numerically absent");
  EXPECT_THROW(fit_tip_asymptotics(u, 1, FitWindow{0.01, 0.5}), ValidationError);
  EXPECT_THROW(fit_tip_asymptotics(u, 1, FitWindow{0.1, 0.05}), ValidationError);
}

TEST(TipFit, PoissonProbeOnUnitCone) {
  const auto mesh = cone_mesh(1.0, 1.0, 512, 0.8);
  const Field psi1 = poisson_probe(mesh, 2, 1);
  EXPECT_NEAR(fit_tip_asymptotics(psi1, 1).rho, 1.0, 0.05);
  const Field psi0 = poisson_probe(mesh, 2, 0);
  double scale = 0.0;
  for (double x : psi0.component(0)) scale = std::max(scale, std::abs(x));
  EXPECT_LE(std::abs(fit_tip_asymptotics(psi0, 0).log_coefficient), 1e-3 * scale);
}

TEST(Linearization, ZeroStateShiftsSpectrum) {
  const auto mesh = sphere_mesh(128);
  const Field zero(mesh, 3);
  const auto lin = linearization_spectrum(zero, 8);
  ASSERT_EQ(lin.eigenvalues.size(), 8u);
  EXPECT_TRUE(lin.axisymmetric);
  const std::vector<double> expect{1, 1, 1, 5, 5, 5, 5, 5};
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(lin.eigenvalues[i] / expect[i], 1.0, 1e-2) << i;

  // Same matrix identity at the discrete level.
  const ops::ModeSpectra spectra(mesh, 3);
  const auto pooled = spectra.pooled(9);
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(lin.eigenvalues[i], pooled[i + 1] - 1.0, 1e-10);
  EXPECT_EQ(lin.kernel_dimension, 0);
}

TEST(Linearization, ConstantStateShift) {
  // Uniform cells: the two eigensolver paths then agree to roundoff at the 1e-9 level.
  const auto mesh = cone_mesh(0.5, 2.0, 64, 1.0);
  const double m = 0.4;
  const auto lin = linearization_spectrum(Field::constant(mesh, 2, m), 6);
  const ops::ModeSpectra spectra(mesh, 2);
  const auto pooled = spectra.pooled(7);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(lin.eigenvalues[i], pooled[i + 1] + 3 * m * m - 1.0, 1e-9);
}

TEST(Linearization, GeneralPathAgreesWithAxisymmetric) {
  const auto mesh = cone_mesh(0.5, 2.0, 32);
  const Field phi = Field::radial_mode(mesh, 2, 0, false, [](double s) { return 0.5 * std::cos(2 * s); });
  Field bumped = phi;
  // A negligible non-axisymmetric part forces the dense path.
  bumped.component(Field::cos_component(1))[5] = 1e-13;
  const auto a = linearization_spectrum(phi, 6);
  const auto b = linearization_spectrum(bumped, 6);
  EXPECT_TRUE(a.axisymmetric);
  EXPECT_FALSE(b.axisymmetric);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(a.eigenvalues[i], b.eigenvalues[i], 1e-8);
}

TEST(Absorbing, SmallDataEntersImmediately) {
  const auto mesh = sphere_mesh(32, 0.85);
  AbsorbingConfig cfg;
  cfg.radii = {0.01};
  cfg.seeds = 2;
  cfg.stepper.T_max = 0.05;
  cfg.diameter_stride = 10;
  const auto rep = absorbing_set_experiment(mesh, 2, cfg);
  ASSERT_EQ(rep.entry_times.size(), 1u);
  EXPECT_EQ(rep.entry_times[0], 0.0);
  for (const auto& m : rep.members) EXPECT_TRUE(m.entered);
  EXPECT_TRUE(std::isfinite(rep.kappa[0]));
}

TEST(Absorbing, Deterministic) {
  const auto mesh = sphere_mesh(32, 0.85);
  AbsorbingConfig cfg;
  cfg.radii = {1.0, 3.0};
  cfg.seeds = 2;
  cfg.stepper.T_max = 0.2;
  cfg.diameter_stride = 20;
  const auto a = absorbing_set_experiment(mesh, 2, cfg);
  const auto b = absorbing_set_experiment(mesh, 2, cfg);
  EXPECT_EQ(a.kappa, b.kappa);
  EXPECT_EQ(a.kappa_mellin, b.kappa_mellin);
  EXPECT_EQ(a.diameter, b.diameter);
  EXPECT_EQ(a.diameter_times, b.diameter_times);
  for (std::size_t i = 0; i < a.members.size(); ++i) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(a.members[i].entry_time),
              std::bit_cast<std::uint64_t>(b.members[i].entry_time));
    EXPECT_EQ(a.members[i].seed, b.members[i].seed);
  }
}

TEST(Absorbing, RejectsBadConfig) {
  const auto mesh = sphere_mesh(16);
  AbsorbingConfig cfg;
  cfg.seeds = 1;
  EXPECT_THROW(absorbing_set_experiment(mesh, 1, cfg), ValidationError);
  cfg.seeds = 2;
  cfg.radii = {-1.0};
  EXPECT_THROW(absorbing_set_experiment(mesh, 1, cfg), ValidationError);
}
