#pragma once

// Experiments on computed fields and trajectories: power-law fits at the tip,
// Lojasiewicz exponent estimates, absorbing-set ensembles and the spectrum of
// the second variation of the energy.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "conekit/dynamics.hpp"
#include "conekit/field.hpp"

namespace conekit::analysis {

struct FitWindow {
  double s_a = 0.0;
  double s_b = 0.0;
};

/// [2 s_min, 0.1 L].
FitWindow default_fit_window(const geometry::RadialMesh& mesh);

struct AsymptoticsFit {
  int mode = 0;
  double rho = 0.0;              // slope of log|u_k| against log s
  double log_coefficient = 0.0;  // b in a + b log s (mode 0 only)
  double intercept = 0.0;
  FitWindow window;
  double r_squared = 0.0;
  int samples = 0;
  bool empty = false;
  std::string message;
};

/// Least-squares power-law fit of the mode-k amplitude sqrt(a_k^2 + b_k^2) over
/// the cell centres in the window. For k = 0 the affine fit a + b log s is
/// reported as well. An amplitude below 1e-13 yields an empty fit flagged
/// "mode numerically absent".
AsymptoticsFit fit_tip_asymptotics(const Field& u, int k, std::optional<FitWindow> window = std::nullopt);

/// Mean-zero psi with Delta psi = g, where g is a smooth mode-k (cosine) bump
/// supported in s > L/2. For k = 0 the bump is balanced to zero mean.
Field poisson_probe(geometry::MeshPtr mesh, int max_mode, int k);

struct LojasiewiczSample {
  double t = 0.0;
  double log_gap = 0.0;   // log(L - L_inf)
  double log_grad = 0.0;  // log ||DL||_{H_0^{-1}}
};

struct LojasiewiczProbe {
  double theta = 0.0;
  double slope = 0.0;  // d log||DL|| / d log(L - L_inf) = 1 - theta
  double r_squared = 0.0;
  double energy_limit = 0.0;
  double t_begin = 0.0;
  double t_end = 0.0;
  std::vector<LojasiewiczSample> samples;
  bool within_bound = false;  // theta in (0, 0.55]
};

struct TrajectoryPoint {
  double t = 0.0;
  double energy = 0.0;
  double grad_norm = 0.0;
};

/// L_inf is the last energy; the final 5% of the samples are discarded and the
/// regression uses the last `tail_fraction` of the rest, keeping samples with
/// L - L_inf > 10 eps |L_inf|. Throws NumericalError("insufficient decay
/// range") with fewer than 10 usable samples.
LojasiewiczProbe lojasiewicz_probe(std::span<const TrajectoryPoint> trajectory, double tail_fraction = 0.5);
LojasiewiczProbe lojasiewicz_probe(std::span<const dynamics::DiagnosticsRecord> records,
                                   double tail_fraction = 0.5);

struct AbsorbingConfig {
  std::vector<double> radii{1.0, 10.0};
  int seeds = 4;
  std::uint64_t base_seed = 1;
  double level = 1.0;  // common H_0^1 level
  int diameter_stride = 50;  // steps between ensemble-diameter samples
  dynamics::StepperConfig stepper;
};

struct AbsorbingMember {
  double radius = 0.0;
  std::uint64_t seed = 0;
  bool entered = false;
  double entry_time = 0.0;
  double kappa = 0.0;        // post-entry sup of the H_0^1 norm
  double kappa_mellin = 0.0; // post-entry sup of ||u|| + ||Delta u|| (Mellin order 0)
  double final_time = 0.0;
  dynamics::RunStatus status = dynamics::RunStatus::horizon;
  std::string message;
};

struct AbsorbingReport {
  std::vector<double> radii;
  std::vector<double> entry_times;  // per radius, max over members (NaN if any member failed to enter)
  std::vector<double> kappa;        // per radius
  std::vector<double> kappa_mellin;
  std::vector<AbsorbingMember> members;
  double common_entry_time = 0.0;
  std::vector<double> diameter_times;
  std::vector<double> diameter;  // max pairwise H_0^{-1} distance, whole ensemble
  /// Largest increase of the diameter between consecutive samples after the common entry time.
  double max_diameter_increase = 0.0;
};

AbsorbingReport absorbing_set_experiment(geometry::MeshPtr mesh, int max_mode, const AbsorbingConfig& cfg);

struct LinearizationSpectrum {
  std::vector<double> eigenvalues;  // ascending, lowest m
  bool axisymmetric = false;
  int kernel_dimension = 0;         // eigenvalues with |lambda| < 1e-6
};

/// Lowest eigenvalues of P(-Delta + 3 phi^2 - 1)P on the discrete mean-zero
/// space, P the L^2 projection off constants. Axisymmetric phi decouples by
/// angular mode; otherwise a dense solve of size (2K+1) M <= 4096 is used.
LinearizationSpectrum linearization_spectrum(const Field& phi, int m_eigs);

}  // namespace conekit::analysis
