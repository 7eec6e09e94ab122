#include "conekit/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <lapacke.h>

#include "conekit/error.hpp"
#include "conekit/parallel.hpp"

namespace conekit::analysis {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return fit;
}

double bump(double s, double lo, double hi) {
  if (s <= lo || s >= hi) return 0.0;
  const double x = std::sin(std::numbers::pi * (s - lo) / (hi - lo));
  return x * x * x * x;
}

std::vector<double> tridiagonal_eigenvalues(std::vector<double> d, std::vector<double> e, int count) {
  const int n = static_cast<int>(d.size());
  count = std::clamp(count, 1, n);
  e.resize(idx(n), 0.0);
  std::vector<double> w(idx(n));
  std::vector<lapack_int> support(2 * idx(n));
  lapack_int found = 0;
  lapack_logical tryrac = 1;
  double dummy = 0.0;
  const lapack_int info = LAPACKE_dstemr(LAPACK_COL_MAJOR, 'N', 'I', n, d.data(), e.data(), 0.0, 0.0, 1, count,
                                         &found, w.data(), &dummy, 1, 1, support.data(), &tryrac);
  if (info != 0 || found != count) throw NumericalError("eigenvalue solve failed (dstemr)");
  w.resize(idx(count));
  return w;
}

// Eigenvalues of the symmetric matrix a (n x n, column major) restricted to
// the orthogonal complement of the unit vector w.
std::vector<double> restricted_eigenvalues(std::vector<double> a, int n, std::vector<double> w) {
  // Householder H = I - 2 v v^T / (v^T v) with H w = -sign(w0) e_0.
  const double norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
  for (double& x : w) x /= norm;
  std::vector<double> v = w;
  v[0] += w[0] >= 0.0 ? 1.0 : -1.0;
  const double vv = std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
  auto at = [&](int i, int j) -> double& { return a[idx(j) * idx(n) + idx(i)]; };
  // p = A v, K = v^T A v; H A H = A - beta (v p^T + p v^T) + beta^2 K v v^T.
  const double beta = 2.0 / vv;
  std::vector<double> p(idx(n), 0.0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) p[idx(i)] += at(i, j) * v[idx(j)];
  }
  const double kv = std::inner_product(v.begin(), v.end(), p.begin(), 0.0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      at(i, j) += -beta * (v[idx(i)] * p[idx(j)] + p[idx(i)] * v[idx(j)]) + beta * beta * kv * v[idx(i)] * v[idx(j)];
    }
  }
  const int m = n - 1;
  std::vector<double> sub(idx(m) * idx(m));
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      sub[idx(j) * idx(m) + idx(i)] = 0.5 * (at(i + 1, j + 1) + at(j + 1, i + 1));
    }
  }
  std::vector<double> values(idx(m));
  if (m > 0) {
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', m, sub.data(), m, values.data());
    if (info != 0) throw NumericalError("dense eigenvalue solve failed (dsyevd)");
  }
  return values;
}

}  // namespace

FitWindow default_fit_window(const geometry::RadialMesh& mesh) {
  return {2.0 * mesh.min_center(), 0.1 * mesh.length()};
}

AsymptoticsFit fit_tip_asymptotics(const Field& u, int k, std::optional<FitWindow> window) {
  if (k < 0 || k > u.max_mode()) throw ValidationError("fit mode k out of range");
  const auto& mesh = u.mesh();
  const FitWindow w = window.value_or(default_fit_window(mesh));
  const double s_min = mesh.min_center();
  if (!(w.s_a < w.s_b) || w.s_a < s_min * (1.0 - 1e-12) || w.s_b > 0.2 * mesh.length() * (1.0 + 1e-12)) {
    throw ValidationError("fit window must satisfy s_min <= s_a < s_b <= 0.2 L");
  }
  AsymptoticsFit fit;
  fit.mode = k;
  fit.window = w;
  const auto& s = mesh.centers();
  const auto cos_part = u.component(Field::cos_component(k));
  std::vector<double> logs;
  std::vector<double> logamp;
  std::vector<double> values;
  double peak = 0.0;
  for (int i = 0; i < mesh.size(); ++i) {
    if (s[idx(i)] < w.s_a || s[idx(i)] > w.s_b) continue;
    double amp = std::abs(cos_part[idx(i)]);
    if (k > 0) amp = std::hypot(amp, u.component(Field::sin_component(k))[idx(i)]);
    peak = std::max(peak, amp);
    logs.push_back(std::log(s[idx(i)]));
    logamp.push_back(amp > 0.0 ? std::log(amp) : -std::numeric_limits<double>::infinity());
    values.push_back(cos_part[idx(i)]);
  }
  fit.samples = static_cast<int>(logs.size());
  if (fit.samples < 3) {
    fit.empty = true;
    fit.message = "fewer than three cells in the fit window";
    return fit;
  }
  if (peak < 1e-13 || std::any_of(logamp.begin(), logamp.end(), [](double v) { return !std::isfinite(v); })) {
    fit.empty = true;
    fit.message = "mode numerically absent";
    return fit;
  }
  const LineFit power = least_squares(logs, logamp);
  fit.rho = power.slope;
  fit.intercept = power.intercept;
  fit.r_squared = power.r_squared;
  if (k == 0) {
    const LineFit affine = least_squares(logs, values);
    fit.log_coefficient = affine.slope;
    fit.intercept = affine.intercept;
    fit.r_squared = affine.r_squared;
  }
  return fit;
}

Field poisson_probe(geometry::MeshPtr mesh, int max_mode, int k) {
  if (k < 0 || k > max_mode) throw ValidationError("probe mode k out of range");
  const double length = mesh->length();
  const auto& s = mesh->centers();
  const auto& vol = mesh->volumes();
  const int m = mesh->size();
  std::vector<double> g(idx(m));
  if (k > 0) {
    for (int i = 0; i < m; ++i) g[idx(i)] = bump(s[idx(i)], 0.5 * length, 0.9 * length);
  } else {
    double i1 = 0.0;
    double i2 = 0.0;
    for (int i = 0; i < m; ++i) {
      i1 += vol[idx(i)] * bump(s[idx(i)], 0.5 * length, 0.7 * length);
      i2 += vol[idx(i)] * bump(s[idx(i)], 0.7 * length, 0.9 * length);
    }
    for (int i = 0; i < m; ++i) {
      g[idx(i)] = bump(s[idx(i)], 0.5 * length, 0.7 * length) - i1 / i2 * bump(s[idx(i)], 0.7 * length, 0.9 * length);
    }
  }
  // Delta psi = g  <=>  -L psi = -g.
  for (double& x : g) x = -x;
  const ops::ModeOperator op(mesh, k);
  const auto psi = ops::solve_helmholtz(op, 0.0, 1.0, g);
  Field out(mesh, max_mode);
  std::copy(psi.begin(), psi.end(), out.component(Field::cos_component(k)).begin());
  return out;
}

LojasiewiczProbe lojasiewicz_probe(std::span<const TrajectoryPoint> trajectory, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) throw ValidationError("tail_fraction must lie in (0, 1]");
  LojasiewiczProbe probe;
  const std::size_t n = trajectory.size();
  if (n == 0) throw NumericalError("insufficient decay range");
  probe.energy_limit = trajectory.back().energy;
  const std::size_t used = n - n / 20;
  const auto begin = static_cast<std::size_t>(std::floor((1.0 - tail_fraction) * static_cast<double>(used)));
  const double floor_gap = 10.0 * std::numeric_limits<double>::epsilon() * std::abs(probe.energy_limit);
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = begin; i < used; ++i) {
    const auto& p = trajectory[i];
    const double gap = p.energy - probe.energy_limit;
    if (!(gap > floor_gap) || !(p.grad_norm > 0.0)) continue;
    probe.samples.push_back({p.t, std::log(gap), std::log(p.grad_norm)});
    x.push_back(std::log(gap));
    y.push_back(std::log(p.grad_norm));
  }
  if (probe.samples.size() < 10) throw NumericalError("insufficient decay range");
  const LineFit fit = least_squares(x, y);
  probe.slope = fit.slope;
  probe.theta = 1.0 - fit.slope;
  probe.r_squared = fit.r_squared;
  probe.t_begin = probe.samples.front().t;
  probe.t_end = probe.samples.back().t;
  probe.within_bound = probe.theta > 0.0 && probe.theta <= 0.55;
  return probe;
}

LojasiewiczProbe lojasiewicz_probe(std::span<const dynamics::DiagnosticsRecord> records, double tail_fraction) {
  std::vector<TrajectoryPoint> points;
  points.reserve(records.size());
  for (const auto& r : records) points.push_back({r.t, r.energy, r.grad_h01dual});
  return lojasiewicz_probe(points, tail_fraction);
}

AbsorbingReport absorbing_set_experiment(geometry::MeshPtr mesh, int max_mode, const AbsorbingConfig& cfg) {
  if (cfg.radii.empty()) throw ValidationError("absorbing-set experiment needs at least one radius");
  for (double r : cfg.radii) {
    if (!(r > 0.0)) throw ValidationError("absorbing-set radii must be positive");
  }
  if (cfg.seeds < 2) throw ValidationError("absorbing-set experiment needs at least 2 seeds per radius");
  if (!(cfg.level > 0.0)) throw ValidationError("absorbing level must be positive");
  if (cfg.diameter_stride < 1) throw ValidationError("diameter_stride must be at least 1");
  cfg.stepper.validate();

  const std::size_t count = cfg.radii.size() * idx(cfg.seeds);
  AbsorbingReport report;
  report.radii = cfg.radii;
  report.members.resize(count);
  std::vector<dynamics::RunResult> runs(count);
  dynamics::RunOptions options;
  options.keep_stride = cfg.diameter_stride;

  parallel_for(count, [&](std::size_t m) {
    const std::size_t ri = m / idx(cfg.seeds);
    AbsorbingMember& member = report.members[m];
    member.radius = cfg.radii[ri];
    member.seed = cfg.base_seed + m;
    const Field u0 = dynamics::random_initial_field(mesh, max_mode, member.seed, member.radius,
                                                    dynamics::IcScale::h01_dual, true);
    runs[m] = dynamics::run_semiflow(u0, cfg.stepper, options);
    const auto& run = runs[m];
    member.status = run.status;
    member.message = run.message;
    member.final_time = run.final_state.t();

    std::vector<const dynamics::DiagnosticsRecord*> trace{&run.initial};
    for (const auto& r : run.records) trace.push_back(&r);
    std::size_t first_inside = trace.size();
    for (std::size_t i = trace.size(); i-- > 0;) {
      if (trace[i]->h1_seminorm > cfg.level) break;
      first_inside = i;
    }
    member.entered = first_inside < trace.size();
    if (member.entered) {
      member.entry_time = trace[first_inside]->t;
      for (std::size_t i = first_inside; i < trace.size(); ++i) {
        member.kappa = std::max(member.kappa, trace[i]->h1_seminorm);
      }
      if (cfg.stepper.mellin) {
        const auto& ms = *cfg.stepper.mellin;
        for (std::size_t i = 0; i < run.kept_states.size(); ++i) {
          if (run.kept_times[i] < member.entry_time) continue;
          const Field& u = run.kept_states[i];
          const double proxy = spaces::mellin_norm(u, 0, ms.gamma, ms.omega) +
                               spaces::mellin_norm(ops::apply_laplacian(u), 0, ms.gamma, ms.omega);
          member.kappa_mellin = std::max(member.kappa_mellin, proxy);
        }
      }
    } else {
      member.entry_time = std::numeric_limits<double>::quiet_NaN();
    }
  });

  for (std::size_t ri = 0; ri < cfg.radii.size(); ++ri) {
    double entry = 0.0;
    double kappa = 0.0;
    double kappa_mellin = 0.0;
    for (int j = 0; j < cfg.seeds; ++j) {
      const auto& member = report.members[ri * idx(cfg.seeds) + idx(j)];
      entry = member.entered ? std::max(entry, member.entry_time) : std::numeric_limits<double>::quiet_NaN();
      kappa = std::max(kappa, member.kappa);
      kappa_mellin = std::max(kappa_mellin, member.kappa_mellin);
      if (!member.entered) break;
    }
    report.entry_times.push_back(entry);
    report.kappa.push_back(kappa);
    report.kappa_mellin.push_back(kappa_mellin);
  }
  report.common_entry_time = 0.0;
  for (double t : report.entry_times) {
    report.common_entry_time = std::isnan(t) ? t : std::max(report.common_entry_time, t);
    if (std::isnan(t)) break;
  }

  // Ensemble diameter on the common sample grid; members that stopped early
  // stay at their final state.
  const double dt = cfg.stepper.dt;
  std::int64_t last_sample = 0;
  for (const auto& run : runs) {
    last_sample = std::max(last_sample, run.final_state.step / cfg.diameter_stride);
  }
  auto state_at = [&](const dynamics::RunResult& run, std::int64_t step) -> const Field& {
    const auto j = static_cast<std::size_t>(step / cfg.diameter_stride);
    if (j < run.kept_states.size() && std::llround(run.kept_times[j] / dt) == step) return run.kept_states[j];
    return run.final_state.u;
  };
  for (std::int64_t j = 0; j <= last_sample; ++j) {
    const std::int64_t step = j * cfg.diameter_stride;
    double diameter = 0.0;
    for (std::size_t a = 0; a < count; ++a) {
      for (std::size_t b = a + 1; b < count; ++b) {
        const Field diff = state_at(runs[a], step) - state_at(runs[b], step);
        diameter = std::max(diameter, spaces::h01_dual_norm(spaces::mean_projected(diff)));
      }
    }
    report.diameter_times.push_back(static_cast<double>(step) * dt);
    report.diameter.push_back(diameter);
  }
  report.max_diameter_increase = 0.0;
  if (std::isnan(report.common_entry_time)) {
    report.max_diameter_increase = std::numeric_limits<double>::quiet_NaN();
  } else {
    for (std::size_t j = 1; j < report.diameter.size(); ++j) {
      if (report.diameter_times[j - 1] < report.common_entry_time) continue;
      report.max_diameter_increase = std::max(report.max_diameter_increase, report.diameter[j] - report.diameter[j - 1]);
    }
  }
  return report;
}

LinearizationSpectrum linearization_spectrum(const Field& phi, int m_eigs) {
  if (m_eigs < 1) throw ValidationError("m_eigs must be positive");
  const auto& mesh = phi.mesh();
  const int m = mesh.size();
  const int kmax = phi.max_mode();
  const auto& vol = mesh.volumes();

  double peak0 = 0.0;
  double peak_rest = 0.0;
  for (int c = 0; c < phi.components(); ++c) {
    for (double v : phi.component(c)) (c == 0 ? peak0 : peak_rest) = std::max(c == 0 ? peak0 : peak_rest, std::abs(v));
  }
  LinearizationSpectrum out;
  out.axisymmetric = peak_rest <= 1e-14 * peak0 || peak_rest == 0.0;
  std::vector<double> values;

  if (out.axisymmetric) {
    const auto a0 = phi.component(0);
    std::vector<double> potential(idx(m));
    for (int i = 0; i < m; ++i) potential[idx(i)] = 3.0 * a0[idx(i)] * a0[idx(i)] - 1.0;
    // Mode 0 on the mean-zero subspace.
    {
      const ops::ModeOperator op(phi.mesh_ptr(), 0);
      std::vector<double> a(idx(m) * idx(m), 0.0);
      for (int i = 0; i < m; ++i) {
        a[idx(i) * idx(m) + idx(i)] = -op.diag()[idx(i)] + potential[idx(i)];
        if (i + 1 < m) {
          a[idx(i) * idx(m) + idx(i) + 1] = -op.sym_off()[idx(i)];
          a[(idx(i) + 1) * idx(m) + idx(i)] = -op.sym_off()[idx(i)];
        }
      }
      std::vector<double> w(idx(m));
      for (int i = 0; i < m; ++i) w[idx(i)] = std::sqrt(vol[idx(i)]);
      const auto v0 = restricted_eigenvalues(std::move(a), m, std::move(w));
      values.insert(values.end(), v0.begin(), v0.begin() + std::min<std::ptrdiff_t>(m_eigs, std::ssize(v0)));
    }
    for (int k = 1; k <= kmax; ++k) {
      const ops::ModeOperator op(phi.mesh_ptr(), k);
      std::vector<double> d(idx(m));
      std::vector<double> e(idx(m) - 1);
      for (int i = 0; i < m; ++i) d[idx(i)] = -op.diag()[idx(i)] + potential[idx(i)];
      for (int i = 0; i + 1 < m; ++i) e[idx(i)] = -op.sym_off()[idx(i)];
      for (double v : tridiagonal_eigenvalues(std::move(d), std::move(e), m_eigs)) {
        values.push_back(v);
        values.push_back(v);
      }
    }
  } else {
    const int comps = phi.components();
    const int n = comps * m;
    if (n > 4096) throw ValidationError("linearization spectrum: dense size (2K+1) M exceeds 4096");
    // Angular coupling blocks: column c' of cell i is P_K(V e_{c'}) at cell i.
    AngularGrid grid(kmax, m);
    const int pts = grid.points();
    std::vector<double> pv(idx(pts) * idx(m));
    grid.to_grid(phi, pv);
    for (double& x : pv) x = 3.0 * x * x - 1.0;
    std::vector<double> a(idx(n) * idx(n), 0.0);
    auto at = [&](int r, int c) -> double& { return a[idx(c) * idx(n) + idx(r)]; };
    std::vector<double> hv(pv.size());
    Field unit(phi.mesh_ptr(), kmax);
    Field product(phi.mesh_ptr(), kmax);
    for (int cp = 0; cp < comps; ++cp) {
      std::fill(unit.data().begin(), unit.data().end(), 0.0);
      std::fill(unit.component(cp).begin(), unit.component(cp).end(), 1.0);
      grid.to_grid(unit, hv);
      for (std::size_t q = 0; q < hv.size(); ++q) hv[q] *= pv[q];
      grid.from_grid(hv, product);
      for (int c = 0; c < comps; ++c) {
        // Symmetric coordinates: y = sqrt(w_c vol_i) x.
        const double scale = std::sqrt(Field::angular_weight(c) / Field::angular_weight(cp));
        for (int i = 0; i < m; ++i) at(c * m + i, cp * m + i) = scale * product.component(c)[idx(i)];
      }
    }
    for (int c = 0; c < comps; ++c) {
      const ops::ModeOperator op(phi.mesh_ptr(), Field::mode_of(c));
      for (int i = 0; i < m; ++i) {
        at(c * m + i, c * m + i) += -op.diag()[idx(i)];
        if (i + 1 < m) {
          at(c * m + i, c * m + i + 1) += -op.sym_off()[idx(i)];
          at(c * m + i + 1, c * m + i) += -op.sym_off()[idx(i)];
        }
      }
    }
    std::vector<double> w(idx(n), 0.0);
    for (int i = 0; i < m; ++i) w[idx(i)] = std::sqrt(vol[idx(i)]);
    values = restricted_eigenvalues(std::move(a), n, std::move(w));
  }
  std::sort(values.begin(), values.end());
  if (std::ssize(values) > m_eigs) values.resize(idx(m_eigs));
  out.eigenvalues = std::move(values);
  for (double v : out.eigenvalues) out.kernel_dimension += std::abs(v) < 1e-6 ? 1 : 0;
  return out;
}

}  // namespace conekit::analysis
