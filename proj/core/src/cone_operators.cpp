#include "conekit/cone_operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <lapacke.h>

#include "conekit/error.hpp"

namespace conekit::ops {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kRefinementSweeps = 2;

std::size_t idx(int i) { return static_cast<std::size_t>(i); }
}  // namespace

// ---------------------------------------------------------------------------
// ModeOperator

ModeOperator::ModeOperator(geometry::MeshPtr mesh, int k) : mesh_(std::move(mesh)), mode_(k) {
  if (!mesh_) throw ValidationError("mode operator requires a mesh");
  if (k < 0) throw ValidationError("mode index must be >= 0");
  const int m = mesh_->size();
  const auto& s = mesh_->centers();
  const auto& vol = mesh_->volumes();
  const auto& ff = mesh_->face_radius();
  const auto& fc = mesh_->center_radius();

  trans_.assign(idx(m) + 1, 0.0);
  for (int j = 1; j < m; ++j) trans_[idx(j)] = kTwoPi * ff[idx(j)] / (s[idx(j)] - s[idx(j - 1)]);

  angular_.resize(idx(m));
  sub_.resize(idx(m));
  diag_.resize(idx(m));
  super_.resize(idx(m));
  sym_off_.assign(idx(std::max(m - 1, 0)), 0.0);
  const double kk = static_cast<double>(k) * static_cast<double>(k);
  for (int i = 0; i < m; ++i) {
    angular_[idx(i)] = kk / (fc[idx(i)] * fc[idx(i)]);
    sub_[idx(i)] = trans_[idx(i)] / vol[idx(i)];
    super_[idx(i)] = trans_[idx(i) + 1] / vol[idx(i)];
    diag_[idx(i)] = -(trans_[idx(i)] + trans_[idx(i) + 1]) / vol[idx(i)] - angular_[idx(i)];
  }
  for (int i = 0; i + 1 < m; ++i) {
    sym_off_[idx(i)] = trans_[idx(i) + 1] / std::sqrt(vol[idx(i)] * vol[idx(i) + 1]);
  }
}

void ModeOperator::apply(std::span<const double> u, std::span<double> out) const {
  const int m = size();
  const auto& vol = mesh_->volumes();
  double flux_lo = 0.0;
  for (int i = 0; i < m; ++i) {
    const double flux_hi = (i + 1 < m) ? trans_[idx(i) + 1] * (u[idx(i) + 1] - u[idx(i)]) : 0.0;
    out[idx(i)] = (flux_hi - flux_lo) / vol[idx(i)] - angular_[idx(i)] * u[idx(i)];
    flux_lo = flux_hi;
  }
}

std::vector<double> ModeOperator::apply(std::span<const double> u) const {
  std::vector<double> out(u.size());
  apply(u, out);
  return out;
}

ModeOperator assemble_mode_operator(geometry::MeshPtr mesh, int k) {
  return ModeOperator(std::move(mesh), k);
}

// ---------------------------------------------------------------------------
// Field-level operators

ConeLaplacian::ConeLaplacian(geometry::MeshPtr mesh, int max_mode) : mesh_(std::move(mesh)) {
  if (max_mode < 0) throw ValidationError("mode cutoff K must be >= 0");
  modes_.reserve(idx(max_mode) + 1);
  for (int k = 0; k <= max_mode; ++k) modes_.emplace_back(mesh_, k);
}

Field ConeLaplacian::apply(const Field& u) const {
  if (u.mesh_ptr() != mesh_) throw ValidationError("field mesh differs from operator mesh");
  if (u.max_mode() > max_mode()) throw ValidationError("field carries more modes than the operator");
  Field out = u.zeros_like();
  for (int c = 0; c < u.components(); ++c) mode(Field::mode_of(c)).apply(u.component(c), out.component(c));
  return out;
}

Field ConeLaplacian::apply_squared(const Field& u) const { return apply(apply(u)); }

Field apply_laplacian(const Field& u) { return ConeLaplacian(u.mesh_ptr(), u.max_mode()).apply(u); }

Field apply_bilaplacian(const Field& u) {
  const ConeLaplacian lap(u.mesh_ptr(), u.max_mode());
  return lap.apply_squared(u);
}

double discrete_gauss_defect(const Field& u) {
  const Field lu = apply_laplacian(u);
  return std::abs(geometry::integrate(u.mesh(), lu));
}

double gauss_defect_bound(const Field& u) {
  const auto& mesh = u.mesh();
  double sup = 0.0;
  for (int i = 0; i < u.cells(); ++i) {
    double v = 0.0;
    for (int c = 0; c < u.components(); ++c) v += std::abs(u.component(c)[idx(i)]);
    sup = std::max(sup, v);
  }
  double ds = mesh.length();
  for (int i = 0; i < mesh.size(); ++i) ds = std::min(ds, mesh.width(i));
  return 1e-12 * sup * mesh.area() / (ds * ds);
}

double vol_dot(const geometry::RadialMesh& mesh, std::span<const double> x, std::span<const double> y) {
  const auto& vol = mesh.volumes();
  double total = 0.0;
  for (std::size_t i = 0; i < vol.size(); ++i) total += vol[i] * x[i] * y[i];
  return total;
}

double vol_norm(const geometry::RadialMesh& mesh, std::span<const double> x) {
  return std::sqrt(std::max(0.0, vol_dot(mesh, x, x)));
}

// ---------------------------------------------------------------------------
// Helmholtz solves

std::vector<double> solve_helmholtz(const ModeOperator& op, double a, double b,
                                    std::span<const double> rhs) {
  const int m = op.size();
  if (static_cast<int>(rhs.size()) != m) throw ValidationError("rhs length differs from mesh size");
  std::vector<double> u(rhs.begin(), rhs.end());
  if (b == 0.0) {
    if (a == 0.0) throw IncompatibleRhsError("helmholtz system with a = b = 0 is singular");
    for (double& x : u) x /= a;
    return u;
  }

  if (a == 0.0 && op.mode() == 0) {
    // Pure Neumann problem: range is the volume-orthogonal complement of constants.
    const auto& vol = op.mesh().volumes();
    double integral = 0.0;
    double scale = 0.0;
    for (int i = 0; i < m; ++i) {
      integral += vol[idx(i)] * rhs[idx(i)];
      scale += vol[idx(i)] * std::abs(rhs[idx(i)]);
    }
    if (std::abs(integral) > 1e-10 * scale) {
      throw IncompatibleRhsError(
          "incompatible right-hand side: -b L_0 u = rhs requires the volume integral of rhs to "
          "vanish (the integral of Delta u over the surface is zero)");
    }
    // Integrate fluxes outward from the tip, where the flux vanishes.
    const auto& trans = op.transmissibility();
    u.assign(idx(m), 0.0);
    double flux = 0.0;
    for (int i = 0; i + 1 < m; ++i) {
      flux += vol[idx(i)] * (-rhs[idx(i)] / b);
      u[idx(i) + 1] = u[idx(i)] + flux / trans[idx(i) + 1];
    }
    double mass = 0.0;
    double area = 0.0;
    for (int i = 0; i < m; ++i) {
      mass += vol[idx(i)] * u[idx(i)];
      area += vol[idx(i)];
    }
    for (double& x : u) x -= mass / area;
    return u;
  }

  std::vector<double> dl(idx(std::max(m - 1, 0)));
  std::vector<double> d(idx(m));
  std::vector<double> du(idx(std::max(m - 1, 0)));
  for (int i = 0; i < m; ++i) {
    d[idx(i)] = a - b * op.diag()[idx(i)];
    if (i + 1 < m) {
      du[idx(i)] = -b * op.super()[idx(i)];
      dl[idx(i)] = -b * op.sub()[idx(i) + 1];
    }
  }
  const lapack_int info = LAPACKE_dgtsv(LAPACK_COL_MAJOR, m, 1, dl.data(), d.data(), du.data(), u.data(), m);
  if (info != 0) throw NumericalError("helmholtz system is singular (dgtsv info " + std::to_string(info) + ")");
  return u;
}

// ---------------------------------------------------------------------------
// Cahn-Hilliard pentadiagonal system

ChSystem::ChSystem(const ModeOperator& op, double dt, double stabilization)
    : op_(&op), dt_(dt), s_(stabilization), n_(op.size()) {
  if (!(dt > 0.0)) throw ValidationError("time step dt must be positive");
  if (!(stabilization >= 0.0)) throw ValidationError("stabilization S must be nonnegative");
  const auto& d = op.diag();
  const auto& e = op.sym_off();
  const auto& vol = op.mesh().volumes();
  sqrt_vol_.resize(idx(n_));
  for (int i = 0; i < n_; ++i) sqrt_vol_[idx(i)] = std::sqrt(vol[idx(i)]);

  // A = I + dt L^2 - S dt L in symmetric coordinates.
  auto off = [&](int i) { return (i >= 0 && i + 1 < n_) ? e[idx(i)] : 0.0; };
  band_.assign(3 * idx(n_), 0.0);
  for (int i = 0; i < n_; ++i) {
    const double di = d[idx(i)];
    const double sq_diag = di * di + off(i - 1) * off(i - 1) + off(i) * off(i);
    band_[3 * idx(i)] = 1.0 + dt * sq_diag - s_ * dt * di;
    if (i + 1 < n_) {
      band_[3 * idx(i) + 1] = dt * off(i) * (di + d[idx(i) + 1]) - s_ * dt * off(i);
    }
    if (i + 2 < n_) band_[3 * idx(i) + 2] = dt * off(i) * off(i + 1);
  }
  matrix_ = band_;
  const lapack_int info = LAPACKE_dpbtrf(LAPACK_COL_MAJOR, 'L', n_, 2, band_.data(), 3);
  if (info != 0) {
    throw NumericalError("CH system is not positive definite (dpbtrf info " + std::to_string(info) + ")");
  }
}

void ChSystem::direct_solve(std::span<double> x) const {
  for (int i = 0; i < n_; ++i) x[idx(i)] *= sqrt_vol_[idx(i)];
  const lapack_int info =
      LAPACKE_dpbtrs(LAPACK_COL_MAJOR, 'L', n_, 2, 1, band_.data(), 3, x.data(), n_);
  if (info != 0) throw NumericalError("banded CH solve failed");
  for (int i = 0; i < n_; ++i) x[idx(i)] /= sqrt_vol_[idx(i)];
}

void ChSystem::solve_in_place(std::span<double> x) const {
  // The banded product loses the cancellation in L^2 u on graded meshes; refine
  // against the flux-form operator, whose residual is accurate.
  std::vector<double> rhs(x.begin(), x.end());
  std::vector<double> r(idx(n_));
  direct_solve(x);
  for (int sweep = 0; sweep < kRefinementSweeps; ++sweep) {
    apply(x, r);
    for (int i = 0; i < n_; ++i) r[idx(i)] = rhs[idx(i)] - r[idx(i)];
    direct_solve(r);
    for (int i = 0; i < n_; ++i) x[idx(i)] += r[idx(i)];
  }
}

std::vector<double> ChSystem::solve(std::span<const double> rhs) const {
  std::vector<double> x(rhs.begin(), rhs.end());
  solve_in_place(x);
  return x;
}

void ChSystem::apply(std::span<const double> u, std::span<double> out) const {
  std::vector<double> lu(idx(n_));
  std::vector<double> llu(idx(n_));
  op_->apply(u, lu);
  op_->apply(lu, llu);
  for (int i = 0; i < n_; ++i) out[idx(i)] = u[idx(i)] + dt_ * llu[idx(i)] - s_ * dt_ * lu[idx(i)];
}

std::pair<double, double> ChSystem::residual(std::span<const double> u, std::span<const double> rhs) const {
  // Symmetric coordinates: vol-weighted norms become Euclidean norms.
  std::vector<double> au(idx(n_));
  apply(u, au);
  double res2 = 0.0;
  double abs2 = 0.0;
  double rhs2 = 0.0;
  for (int i = 0; i < n_; ++i) {
    const double r = sqrt_vol_[idx(i)] * (au[idx(i)] - rhs[idx(i)]);
    double a = 0.0;
    for (int j = std::max(0, i - 2); j <= std::min(n_ - 1, i + 2); ++j) {
      const int lo = std::min(i, j);
      const int hi = std::max(i, j);
      const double aij = matrix_[3 * idx(lo) + idx(hi - lo)];
      a += std::abs(aij) * std::abs(sqrt_vol_[idx(j)] * u[idx(j)]);
    }
    res2 += r * r;
    abs2 += a * a;
    const double ri = sqrt_vol_[idx(i)] * rhs[idx(i)];
    rhs2 += ri * ri;
  }
  return {std::sqrt(res2), std::sqrt(rhs2) + std::sqrt(abs2)};
}

std::vector<double> solve_ch_system(const ModeOperator& op, double dt, double stabilization,
                                    std::span<const double> rhs) {
  return ChSystem(op, dt, stabilization).solve(rhs);
}

const ChSystem& ChSolverCache::get(int k, double dt, double stabilization) {
  std::lock_guard lock(mutex_);
  auto& slot = cache_[{dt, stabilization}];
  if (slot.empty()) {
    slot.resize(idx(lap_->max_mode()) + 1);
  }
  auto& entry = slot.at(idx(k));
  if (!entry) entry = std::make_unique<ChSystem>(lap_->mode(k), dt, stabilization);
  return *entry;
}

// ---------------------------------------------------------------------------
// Spectral calculus

ModeEigensystem eigendecompose_mode(const ModeOperator& op) {
  const int n = op.size();
  std::vector<double> d(idx(n));
  std::vector<double> e(idx(n), 0.0);
  for (int i = 0; i < n; ++i) d[idx(i)] = -op.diag()[idx(i)];
  for (int i = 0; i + 1 < n; ++i) e[idx(i)] = -op.sym_off()[idx(i)];

  ModeEigensystem sys;
  sys.mode = op.mode();
  sys.size = n;
  sys.values.assign(idx(n), 0.0);
  sys.vectors.assign(idx(n) * idx(n), 0.0);
  std::vector<lapack_int> support(2 * idx(n));
  lapack_int found = 0;
  lapack_logical tryrac = 1;
  const lapack_int info = LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'A', n, d.data(), e.data(), 0.0, 0.0, 0,
                                         0, &found, sys.values.data(), sys.vectors.data(), n, n,
                                         support.data(), &tryrac);
  if (info != 0 || found != n) {
    throw NumericalError("tridiagonal eigensolver failed (dstemr info " + std::to_string(info) + ")");
  }
  // Back to physical coordinates; fix the sign so the largest entry is positive.
  const auto& vol = op.mesh().volumes();
  for (int j = 0; j < n; ++j) {
    double* col = sys.vectors.data() + idx(j) * idx(n);
    int arg = 0;
    for (int i = 0; i < n; ++i) {
      if (std::abs(col[i]) > std::abs(col[arg])) arg = i;
    }
    const double sign = col[arg] < 0.0 ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) col[i] = sign * col[i] / std::sqrt(vol[idx(i)]);
  }
  return sys;
}

ModeEigensystem eigendecompose_mode(geometry::MeshPtr mesh, int k) {
  const ModeOperator op(std::move(mesh), k);
  return eigendecompose_mode(op);
}

ModeSpectra::ModeSpectra(geometry::MeshPtr mesh, int max_mode) : mesh_(std::move(mesh)) {
  if (max_mode < 0) throw ValidationError("mode cutoff K must be >= 0");
  systems_.reserve(idx(max_mode) + 1);
  for (int k = 0; k <= max_mode; ++k) systems_.push_back(eigendecompose_mode(mesh_, k));
}

std::vector<double> ModeSpectra::pooled(int count) const {
  std::vector<double> all;
  for (const auto& sys : systems_) {
    const int mult = sys.mode == 0 ? 1 : 2;
    for (double mu : sys.values) all.insert(all.end(), idx(mult), mu);
  }
  std::sort(all.begin(), all.end());
  if (count >= 0 && idx(count) < all.size()) all.resize(idx(count));
  return all;
}

void ModeSpectra::apply_mode(int k, std::span<const double> in, std::span<double> out,
                             const std::vector<double>& multipliers) const {
  const auto& sys = mode(k);
  const auto& vol = mesh_->volumes();
  const int n = sys.size;
  std::vector<double> weighted(idx(n));
  for (int i = 0; i < n; ++i) weighted[idx(i)] = vol[idx(i)] * in[idx(i)];
  std::fill(out.begin(), out.end(), 0.0);
  for (int j = 0; j < n; ++j) {
    const auto phi = sys.vector(j);
    double coeff = 0.0;
    for (int i = 0; i < n; ++i) coeff += phi[idx(i)] * weighted[idx(i)];
    coeff *= multipliers[idx(j)];
    for (int i = 0; i < n; ++i) out[idx(i)] += coeff * phi[idx(i)];
  }
}

Field ModeSpectra::fractional_power(double alpha, const Field& u) const {
  if (alpha < -1.0 || alpha > 2.0) throw ValidationError("fractional power exponent must lie in [-1, 2]");
  return apply_multiplier(u, [alpha](double mu) { return std::pow(1.0 + std::max(mu, 0.0), 2.0 * alpha); });
}

Field fractional_power_apply(double alpha, const Field& u, const ModeSpectra& spectra) {
  return spectra.fractional_power(alpha, u);
}

double semigroup_decay_sup(double alpha, double delta, std::span<const double> eigenvalues,
                           std::span<const double> times) {
  double sup = 0.0;
  for (double mu : eigenvalues) {
    const double lam = (1.0 + std::max(mu, 0.0)) * (1.0 + std::max(mu, 0.0));
    for (double t : times) {
      const double log_v = alpha * std::log(t) + alpha * std::log(lam) - (lam - delta) * t;
      sup = std::max(sup, std::exp(log_v));
    }
  }
  return sup;
}

}  // namespace conekit::ops
