#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "conekit/dynamics.hpp"
#include "conekit/geometry.hpp"
#include "conekit/indicial.hpp"

namespace conekit::app {

struct GeometryConfig {
  geometry::ProfileKind kind = geometry::ProfileKind::sphere;
  double radius = 1.0;
  double c = 1.0;
  double c2 = 1.0;
  double L = 1.0;
  int M = 256;
  double q = 0.85;
  int K = 32;
  friend bool operator==(const GeometryConfig&, const GeometryConfig&) = default;
};

enum class InitialData { random, zero, constant, eigenmode };

struct DynamicsConfig {
  double dt = 1e-3;
  double S = 2.0;
  double T_max = 1e3;
  double eq_tol = 1e-8;
  std::uint64_t seed = 1;
  bool linear_only = false;
  int snapshot_stride = 10;
  int snapshot_every = 0;  // records between snapshot files; 0 = initial and final only
  bool adaptive_S = false;
  InitialData ic = InitialData::random;
  double ic_amplitude = 0.1;
  int ic_mode = 1;
  bool ic_mean_zero = true;
  friend bool operator==(const DynamicsConfig&, const DynamicsConfig&) = default;
};

struct NormsConfig {
  double gamma = 0.0;                          // resolved: CH window midpoint by default
  std::vector<std::pair<int, double>> pairs;   // (order, gamma)
  bool allow_out_of_window = false;
  friend bool operator==(const NormsConfig&, const NormsConfig&) = default;
};

struct ExperimentConfig {
  std::vector<double> radii{1.0, 10.0};
  int seeds = 4;
  double absorb_level = 1.0;
  int diameter_stride = 50;
  double tail_fraction = 0.5;
  std::vector<int> fit_modes{0, 1, 2};
  int eig_count = 10;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct RunConfig {
  GeometryConfig geometry;
  DynamicsConfig dynamics;
  NormsConfig norms;
  ExperimentConfig experiment;
  std::vector<std::string> warnings;  // not part of equality

  friend bool operator==(const RunConfig& a, const RunConfig& b) {
    return a.geometry == b.geometry && a.dynamics == b.dynamics && a.norms == b.norms &&
           a.experiment == b.experiment;
  }
};

/// key = value assignments in order, keyed "section.key" (or bare "key").
using Assignments = std::vector<std::pair<std::string, std::string>>;

/// Reads an INI-style file: [section] headers, key = value, '#' or ';' comments.
/// Sections [run] and [summary] are ignored.
Assignments read_config_file(const std::string& path);
Assignments read_config_text(const std::string& text);

/// Applies assignments over the defaults, resolves derived defaults and validates.
/// Throws ValidationError naming the offending key.
RunConfig parse_config(const Assignments& assignments, bool allow_out_of_window = false);

/// All fields as ordered (section, key, value) triples, 17 significant digits.
std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> config_sections(
    const RunConfig& cfg);

std::string format_real(double x);

std::shared_ptr<const geometry::SurfaceProfile> make_profile(const GeometryConfig& g);
geometry::MeshPtr make_mesh(const GeometryConfig& g);
dynamics::StepperConfig stepper_config(const RunConfig& cfg, const geometry::SurfaceProfile& profile);
indicial::GammaWindow ch_window_for(const GeometryConfig& g);

}  // namespace conekit::app
