#include "conekit/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "conekit/error.hpp"

namespace conekit::dynamics {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

constexpr double kResidualTolerance = 1e-10;
constexpr double kEnergySlack = 1e-9;

std::span<double> grid_values(const Field& u, Workspace& ws) {
  auto& buf = ws.buffer();
  ws.grid().to_grid(u, buf);
  return buf;
}

double grid_sup(std::span<const double> values) {
  double sup = 0.0;
  for (double v : values) sup = std::max(sup, std::abs(v));
  return sup;
}

Field cube(const Field& u, Workspace& ws) {
  auto values = grid_values(u, ws);
  for (double& v : values) v = v * v * v;
  Field out = u.zeros_like();
  ws.grid().from_grid(values, out);
  return out;
}

double effective_stabilization(const StepperConfig& cfg, double sup) {
  if (!cfg.adaptive_S) return cfg.S;
  const double need = 0.5 * (3.0 * sup * sup - 1.0);
  return std::max(cfg.S, std::ceil(2.0 * need) / 2.0);
}

void require_workspace(const Field& u, const Workspace& ws) {
  if (u.mesh_ptr() != ws.mesh_ptr() || u.max_mode() != ws.max_mode()) {
    throw ValidationError("field does not match the workspace mesh or mode count");
  }
}

}  // namespace

void StepperConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
  if (!(S >= 0.0)) throw ValidationError("S must be nonnegative");
  if (!(T_max >= 0.0)) throw ValidationError("T_max must be nonnegative");
  if (!(eq_tol > 0.0)) throw ValidationError("eq_tol must be positive");
  if (snapshot_stride < 1) throw ValidationError("snapshot_stride must be at least 1");
}

Workspace::Workspace(geometry::MeshPtr mesh, int max_mode)
    : mesh_(std::move(mesh)),
      max_mode_(max_mode),
      laplacian_(std::make_unique<ops::ConeLaplacian>(mesh_, max_mode)),
      solvers_(std::make_unique<ops::ChSolverCache>(*laplacian_)),
      grid_(max_mode, mesh_->size()),
      buffer_(idx(grid_.points()) * idx(mesh_->size())) {}

SemiflowState make_state(Field u0) {
  SemiflowState state{0, 0.0, std::move(u0), nullptr};
  state.workspace = std::make_shared<Workspace>(state.u.mesh_ptr(), state.u.max_mode());
  return state;
}

double energy(const Field& u, Workspace& ws) {
  require_workspace(u, ws);
  const auto values = grid_values(u, ws);
  const auto& vol = u.mesh().volumes();
  const int n = ws.grid().points();
  double potential = 0.0;
  for (int i = 0; i < u.cells(); ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      const double v2 = values[idx(i) * idx(n) + idx(j)] * values[idx(i) * idx(n) + idx(j)];
      row += 0.25 * v2 * v2 - 0.5 * v2;
    }
    potential += vol[idx(i)] * row / n;
  }
  const double semi = spaces::h1_seminorm(u);
  return 0.5 * semi * semi + potential;
}

double energy(const Field& u) {
  Workspace ws(u.mesh_ptr(), u.max_mode());
  return energy(u, ws);
}

Field energy_gradient(const Field& u, Workspace& ws) {
  require_workspace(u, ws);
  Field c = cube(u, ws);
  const double mean_cube = spaces::mean(c);
  Field g = c - u - ws.laplacian().apply(u);
  auto g0 = g.component(0);
  for (double& v : g0) v -= mean_cube;
  return g;
}

Field energy_gradient(const Field& u) {
  Workspace ws(u.mesh_ptr(), u.max_mode());
  return energy_gradient(u, ws);
}

double sup_norm(const Field& u, Workspace& ws) {
  require_workspace(u, ws);
  return grid_sup(grid_values(u, ws));
}

double sup_norm(const Field& u) {
  Workspace ws(u.mesh_ptr(), u.max_mode());
  return sup_norm(u, ws);
}

SemiflowState step_imex(const SemiflowState& state, const StepperConfig& cfg) {
  if (!state.workspace) throw ValidationError("semiflow state has no workspace");
  Workspace& ws = *state.workspace;
  const Field& u = state.u;
  require_workspace(u, ws);
  const double dt = cfg.dt;

  auto values = grid_values(u, ws);
  const double S = effective_stabilization(cfg, grid_sup(values));
  Field nonlinear = u.zeros_like();
  if (!cfg.linear_only) {
    for (double& v : values) v = v * v * v;
    ws.grid().from_grid(values, nonlinear);
  }
  nonlinear -= (1.0 + S) * u;

  SemiflowState next{state.step + 1, dt, u.zeros_like(), state.workspace};
  const int m = u.cells();
  std::vector<double> ln(idx(m));
  for (int c = 0; c < u.components(); ++c) {
    const int k = Field::mode_of(c);
    const auto& op = ws.laplacian().mode(k);
    op.apply(nonlinear.component(c), ln);
    auto rhs = u.component(c);
    auto out = next.u.component(c);
    for (int i = 0; i < m; ++i) out[idx(i)] = rhs[idx(i)] + dt * ln[idx(i)];
    std::vector<double> b(out.begin(), out.end());
    const auto& system = ws.solvers().get(k, dt, S);
    system.solve_in_place(out);
    const auto [res, scale] = system.residual(out, b);
    if (!(res <= kResidualTolerance * scale)) {
      throw NumericalError("CH solve residual " + std::to_string(res) + " exceeds tolerance (mode " +
                           std::to_string(k) + ", step " + std::to_string(next.step) + ")");
    }
  }

  // The k = 0 update has zero volume integral; remove the roundoff.
  const auto& vol = u.mesh().volumes();
  auto a_new = next.u.component(0);
  const auto a_old = u.component(0);
  double drift = 0.0;
  for (int i = 0; i < m; ++i) drift += vol[idx(i)] * (a_new[idx(i)] - a_old[idx(i)]);
  const double shift = drift / u.mesh().area();
  for (double& v : a_new) v -= shift;
  return next;
}

EquilibriumCheck detect_equilibrium(const SemiflowState& state, const SemiflowState& previous,
                                    const StepperConfig& cfg) {
  const double dt = state.dt > 0.0 ? state.dt : cfg.dt;
  Field rate = (state.u - previous.u) * (1.0 / dt);
  EquilibriumCheck check;
  check.residual = spaces::h01_dual_norm(spaces::mean_projected(rate));
  check.reached = check.residual < cfg.eq_tol;
  return check;
}

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::equilibrium: return "equilibrium";
    case RunStatus::horizon: return "horizon";
    case RunStatus::stability_violated: return "stability_violated";
    case RunStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

DiagnosticsRecord diagnose(const Field& u, Workspace& ws, const StepperConfig& cfg) {
  DiagnosticsRecord r;
  r.mass = spaces::mean(u);
  r.energy = energy(u, ws);
  r.h1_seminorm = spaces::h1_seminorm(u);
  r.grad_h01dual = spaces::h01_dual_norm(spaces::mean_projected(energy_gradient(u, ws)));
  if (cfg.mellin) {
    r.mellin_s0 = spaces::mellin_norm(u, 0, cfg.mellin->gamma, cfg.mellin->omega);
    r.mellin_s1 = spaces::mellin_norm(u, 1, cfg.mellin->gamma, cfg.mellin->omega);
  }
  r.max_abs_u = sup_norm(u, ws);
  return r;
}

RunResult run_semiflow(const Field& u0, const StepperConfig& cfg, const RunOptions& options) {
  return run_semiflow(make_state(u0), cfg, options);
}

RunResult run_semiflow(const SemiflowState& start, const StepperConfig& cfg, const RunOptions& options) {
  cfg.validate();
  SemiflowState state = start;
  if (!state.workspace) state = make_state(start.u);
  if (state.dt > 0.0 && state.dt != cfg.dt) {
    throw ValidationError("continuing a run requires the same dt");
  }
  state.dt = cfg.dt;
  Workspace& ws = *state.workspace;

  RunResult result;
  result.initial = diagnose(state.u, ws, cfg);
  result.initial.step = state.step;
  result.initial.t = state.t();
  const double mass0 = result.initial.mass;
  double e_prev = result.initial.energy;

  const auto steps = static_cast<std::int64_t>(std::ceil(cfg.T_max / cfg.dt - 1e-9));
  const std::int64_t last_step = state.step + steps;
  const auto keep = [&](const SemiflowState& s) {
    result.kept_times.push_back(s.t());
    result.kept_states.push_back(s.u);
  };
  if (options.keep_stride > 0) keep(state);

  while (state.step < last_step) {
    std::optional<SemiflowState> stepped;
    try {
      stepped = step_imex(state, cfg);
    } catch (const NumericalError& e) {
      result.status = RunStatus::numerical_failure;
      result.message = e.what();
      break;
    }
    SemiflowState& next = *stepped;
    const double e_next = energy(next.u, ws);
    const double slack = kEnergySlack * (1.0 + std::abs(e_prev));
    const bool unstable = !std::isfinite(e_next) || e_next - e_prev > slack;
    result.max_energy_increase =
        std::max(result.max_energy_increase, std::isfinite(e_next) ? (e_next - e_prev) / (1.0 + std::abs(e_prev))
                                                                   : std::numeric_limits<double>::infinity());
    const double mass = spaces::mean(next.u);
    result.mass_drift = std::max(result.mass_drift, std::abs(mass - mass0));

    EquilibriumCheck eq;
    if (!unstable) eq = detect_equilibrium(next, state, cfg);
    const bool last = unstable || eq.reached || next.step >= last_step;
    if (next.step % cfg.snapshot_stride == 0 || last) {
      DiagnosticsRecord rec;
      if (unstable && !std::isfinite(e_next)) {
        rec.mass = mass;
        rec.energy = e_next;
        rec.max_abs_u = sup_norm(next.u, ws);
      } else {
        rec = diagnose(next.u, ws, cfg);
      }
      rec.step = next.step;
      rec.t = next.t();
      rec.ut_h01dual = eq.residual;
      rec.energy_increase = unstable;
      result.records.push_back(rec);
    }
    if (options.keep_stride > 0 && (next.step % options.keep_stride == 0 || last)) keep(next);
    state = std::move(next);
    e_prev = e_next;
    if (unstable) {
      result.status = RunStatus::stability_violated;
      result.message = "stability violated: reduce dt or raise S";
      break;
    }
    if (eq.reached) {
      result.status = RunStatus::equilibrium;
      break;
    }
  }
  result.final_state = std::move(state);
  return result;
}

Field random_initial_field(geometry::MeshPtr mesh, int max_mode, std::uint64_t seed, double size,
                           IcScale scale, bool mean_zero) {
  if (!(size >= 0.0)) throw ValidationError("initial-data size must be nonnegative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Field u(mesh, max_mode);
  for (int c = 0; c < u.components(); ++c) {
    const int k = Field::mode_of(c);
    const double w = k == 0 ? 1.0 : 1.0 / (static_cast<double>(k) * k);
    for (double& v : u.component(c)) v = w * gauss(rng);
  }
  ops::ConeLaplacian lap(mesh, max_mode);
  for (int pass = 0; pass < 2; ++pass) {
    for (int c = 0; c < u.components(); ++c) {
      const auto smoothed = ops::solve_helmholtz(lap.mode(Field::mode_of(c)), 1.0, 1.0, u.component(c));
      std::copy(smoothed.begin(), smoothed.end(), u.component(c).begin());
    }
  }
  if (mean_zero) u = spaces::mean_projected(u);
  if (size == 0.0) return u.zeros_like();
  const double current = scale == IcScale::sup_norm ? sup_norm(u)
                                                    : spaces::h01_dual_norm(spaces::mean_projected(u));
  if (!(current > 0.0)) throw NumericalError("random initial field vanished");
  u *= size / current;
  return u;
}

}  // namespace conekit::dynamics
