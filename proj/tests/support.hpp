#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "conekit/field.hpp"
#include "conekit/geometry.hpp"

namespace conekit::testing {

inline geometry::MeshPtr sphere_mesh(int cells, double q = 1.0, double radius = 1.0) {
  const double p[] = {radius};
  return geometry::build_mesh(geometry::build_profile(geometry::ProfileKind::sphere, p), cells, q);
}

inline geometry::MeshPtr cone_mesh(double c, double L, int cells, double q = 0.85) {
  const double p[] = {c, L};
  return geometry::build_mesh(geometry::build_profile(geometry::ProfileKind::cone_capped, p), cells, q);
}

/// Independent Gaussian coefficients in every component.
inline Field random_field(const geometry::MeshPtr& mesh, int K, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  Field u(mesh, K);
  for (int c = 0; c < u.components(); ++c) {
    for (double& x : u.component(c)) x = normal(rng);
  }
  return u;
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace conekit::testing
