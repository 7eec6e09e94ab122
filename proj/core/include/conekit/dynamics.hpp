#pragma once

// Cahn-Hilliard semiflow u' + Delta^2 u = Delta(u^3 - u): Lyapunov energy,
// its H_0^{-1} gradient, a stabilized linearly implicit step and the run loop.

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "conekit/angular.hpp"
#include "conekit/cone_operators.hpp"
#include "conekit/field.hpp"
#include "conekit/spaces.hpp"

namespace conekit::dynamics {

struct MellinSettings {
  double gamma = -0.75;
  spaces::CutoffFunction omega;
};

struct StepperConfig {
  double dt = 1e-3;
  double S = 2.0;
  double T_max = 1e3;
  double eq_tol = 1e-8;
  bool linear_only = false;
  int snapshot_stride = 1;
  /// Raise S to at least (3 max|u|^2 - 1) / 2 (rounded up to a multiple of 1/2).
  bool adaptive_S = false;
  /// Mellin norms of order 0 and 1 recorded in the diagnostics when set.
  std::optional<MellinSettings> mellin;

  void validate() const;
};

struct DiagnosticsRecord {
  std::int64_t step = 0;
  double t = 0.0;
  double mass = 0.0;  // mean of u
  double energy = 0.0;
  double h1_seminorm = 0.0;
  double ut_h01dual = 0.0;    // ||(u^{n+1} - u^n) / dt|| in H_0^{-1}
  double grad_h01dual = 0.0;  // ||energy_gradient(u)|| in H_0^{-1}
  double mellin_s0 = 0.0;
  double mellin_s1 = 0.0;
  double max_abs_u = 0.0;
  bool energy_increase = false;
};

/// Per-mesh operators shared by all steps of a run: the Laplacian, cached
/// CH factorisations keyed by (dt, S) and the dealiasing grid.
class Workspace {
 public:
  Workspace(geometry::MeshPtr mesh, int max_mode);

  const geometry::MeshPtr& mesh_ptr() const noexcept { return mesh_; }
  int max_mode() const noexcept { return max_mode_; }
  const ops::ConeLaplacian& laplacian() const noexcept { return *laplacian_; }
  ops::ChSolverCache& solvers() noexcept { return *solvers_; }
  AngularGrid& grid() noexcept { return grid_; }
  std::vector<double>& buffer() noexcept { return buffer_; }

 private:
  geometry::MeshPtr mesh_;
  int max_mode_;
  std::unique_ptr<ops::ConeLaplacian> laplacian_;
  std::unique_ptr<ops::ChSolverCache> solvers_;
  AngularGrid grid_;
  std::vector<double> buffer_;
};

struct SemiflowState {
  std::int64_t step = 0;
  double dt = 0.0;  // 0 before the first step
  Field u;
  std::shared_ptr<Workspace> workspace;

  double t() const { return static_cast<double>(step) * dt; }
};

SemiflowState make_state(Field u0);

/// 1/2 |u|_1^2 + integral of (u^4/4 - u^2/2), quartic term on the dealiased grid.
double energy(const Field& u);
double energy(const Field& u, Workspace& ws);
/// -Delta u + P_K(u^3) - u - mean(u^3); mean-zero whenever u is.
Field energy_gradient(const Field& u);
Field energy_gradient(const Field& u, Workspace& ws);
/// Pointwise sup of |u| over the angular grid.
double sup_norm(const Field& u);
double sup_norm(const Field& u, Workspace& ws);

/// One step of (I + dt L^2 - S dt L) u^{n+1} = u^n + dt L N(u^n),
/// N(u) = P_K(u^3) - (1 + S) u (cubic dropped when linear_only). Throws
/// NumericalError when a mode solve leaves a residual above 1e-10 relative
/// to its backward-error scale.
SemiflowState step_imex(const SemiflowState& state, const StepperConfig& cfg);

struct EquilibriumCheck {
  bool reached = false;
  double residual = 0.0;
};
EquilibriumCheck detect_equilibrium(const SemiflowState& state, const SemiflowState& previous,
                                    const StepperConfig& cfg);

enum class RunStatus { equilibrium, horizon, stability_violated, numerical_failure };
std::string_view to_string(RunStatus status);

struct RunOptions {
  /// Keep a copy of u every `keep_stride` steps (0 keeps nothing); the
  /// final state is always available in the result.
  int keep_stride = 0;
};

struct RunResult {
  RunStatus status = RunStatus::horizon;
  std::string message;
  DiagnosticsRecord initial;
  std::vector<DiagnosticsRecord> records;  // every snapshot_stride steps and the last step
  std::vector<double> kept_times;
  std::vector<Field> kept_states;
  SemiflowState final_state;
  /// Largest (E_{n+1} - E_n) / (1 + |E_n|) over all steps.
  double max_energy_increase = -std::numeric_limits<double>::infinity();
  double mass_drift = 0.0;  // max |mass(t) - mass(0)| over all steps
};

RunResult run_semiflow(const Field& u0, const StepperConfig& cfg, const RunOptions& options = {});
/// Continues from a previous state; step numbering and stride alignment carry over.
RunResult run_semiflow(const SemiflowState& start, const StepperConfig& cfg,
                       const RunOptions& options = {});

DiagnosticsRecord diagnose(const Field& u, Workspace& ws, const StepperConfig& cfg);

enum class IcScale { sup_norm, h01_dual };

/// Seeded random field: Gaussian mode amplitudes decaying like k^-2, smoothed
/// twice by (I - Delta)^{-1}, projected to mean zero when requested and scaled
/// so the chosen norm equals `size`.
Field random_initial_field(geometry::MeshPtr mesh, int max_mode, std::uint64_t seed, double size,
                           IcScale scale = IcScale::sup_norm, bool mean_zero = true);

}  // namespace conekit::dynamics
