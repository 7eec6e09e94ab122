#pragma once

// Flux-form finite-volume discretisation of the cone Laplacian, one angular
// Fourier mode at a time, plus the banded solves and spectral calculus built
// on it.
//
// For mode k the operator is L_k u = ((f u')' - k^2 u / f) / f. Cell i receives
// (F_{i+1/2} - F_{i-1/2}) / vol_i - (k / f_i)^2 u_i with face fluxes
// F = T (u_{i+1} - u_i), T = 2 pi f(face) / (s_{i+1} - s_i). The end faces carry
// f = 0, hence zero flux; no unknown lives at a tip.

#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "conekit/error.hpp"
#include "conekit/field.hpp"
#include "conekit/geometry.hpp"

namespace conekit::ops {

class ModeOperator {
 public:
  ModeOperator(geometry::MeshPtr mesh, int k);

  int mode() const noexcept { return mode_; }
  int size() const noexcept { return static_cast<int>(diag_.size()); }
  const geometry::RadialMesh& mesh() const noexcept { return *mesh_; }
  const geometry::MeshPtr& mesh_ptr() const noexcept { return mesh_; }

  /// Face transmissibilities, size M+1; the two end entries are zero.
  const std::vector<double>& transmissibility() const noexcept { return trans_; }
  /// Matrix entries of L_k: row i couples to i-1 (sub), i (diag), i+1 (super).
  const std::vector<double>& sub() const noexcept { return sub_; }
  const std::vector<double>& diag() const noexcept { return diag_; }
  const std::vector<double>& super() const noexcept { return super_; }

  /// Symmetric form V^{1/2} L_k V^{-1/2}: diagonal equals diag(), off-diagonal
  /// entry i couples cells i and i+1 (size M-1).
  const std::vector<double>& sym_off() const noexcept { return sym_off_; }

  /// out = L_k u in flux form (exact telescoping of fluxes for k = 0).
  void apply(std::span<const double> u, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> u) const;

 private:
  geometry::MeshPtr mesh_;
  int mode_ = 0;
  std::vector<double> trans_;
  std::vector<double> angular_;  // (k / f_i)^2
  std::vector<double> sub_, diag_, super_, sym_off_;
};

ModeOperator assemble_mode_operator(geometry::MeshPtr mesh, int k);

/// Mode operators 0..K for one mesh.
class ConeLaplacian {
 public:
  ConeLaplacian(geometry::MeshPtr mesh, int max_mode);
  int max_mode() const noexcept { return static_cast<int>(modes_.size()) - 1; }
  const ModeOperator& mode(int k) const { return modes_.at(static_cast<std::size_t>(k)); }
  const geometry::MeshPtr& mesh_ptr() const noexcept { return mesh_; }

  Field apply(const Field& u) const;
  Field apply_squared(const Field& u) const;

 private:
  geometry::MeshPtr mesh_;
  std::vector<ModeOperator> modes_;
};

Field apply_laplacian(const Field& u);
Field apply_bilaplacian(const Field& u);

/// |integral of L u|; vanishes up to roundoff by flux telescoping.
double discrete_gauss_defect(const Field& u);
/// Roundoff scale the defect is compared against: 1e-12 ||u||_inf area / ds_min^2.
double gauss_defect_bound(const Field& u);

/// Vol-weighted norm sqrt(sum vol_i x_i^2) of a radial vector.
double vol_norm(const geometry::RadialMesh& mesh, std::span<const double> x);
double vol_dot(const geometry::RadialMesh& mesh, std::span<const double> x, std::span<const double> y);

/// Solves (a I - b L_k) u = rhs. For a = 0, k = 0 the system is singular: rhs
/// must have zero volume integral and the mean-zero solution is returned.
std::vector<double> solve_helmholtz(const ModeOperator& op, double a, double b,
                                    std::span<const double> rhs);

/// Banded Cholesky factorisation of I + dt L_k^2 - S dt L_k (symmetric
/// positive definite in the vol-weighted inner product for dt > 0, S >= 0).
class ChSystem {
 public:
  ChSystem(const ModeOperator& op, double dt, double stabilization);

  double dt() const noexcept { return dt_; }
  double stabilization() const noexcept { return s_; }

  std::vector<double> solve(std::span<const double> rhs) const;
  void solve_in_place(std::span<double> x) const;
  /// out = (I + dt L^2 - S dt L) u.
  void apply(std::span<const double> u, std::span<double> out) const;
  /// Vol-weighted residual norm and the backward-error scale
  /// ||rhs|| + || |A| |u| || used to judge it.
  std::pair<double, double> residual(std::span<const double> u, std::span<const double> rhs) const;

 private:
  void direct_solve(std::span<double> x) const;

  const ModeOperator* op_;
  double dt_;
  double s_;
  int n_;
  std::vector<double> matrix_;  // unfactored lower band, ldab = 3
  std::vector<double> band_;    // Cholesky factor in LAPACK lower band storage
  std::vector<double> sqrt_vol_;
};

std::vector<double> solve_ch_system(const ModeOperator& op, double dt, double stabilization,
                                    std::span<const double> rhs);

/// Factorisations of the CH system for every mode, cached per (dt, S).
class ChSolverCache {
 public:
  explicit ChSolverCache(const ConeLaplacian& laplacian) : lap_(&laplacian) {}
  const ChSystem& get(int k, double dt, double stabilization);

 private:
  const ConeLaplacian* lap_;
  std::mutex mutex_;
  std::map<std::pair<double, double>, std::vector<std::unique_ptr<ChSystem>>> cache_;
};

/// Eigenpairs of -L_k, ascending, eigenvectors orthonormal in sum vol_i x_i y_i.
struct ModeEigensystem {
  int mode = 0;
  int size = 0;
  std::vector<double> values;
  std::vector<double> vectors;  // column-major, column j is eigenvector j

  std::span<const double> vector(int j) const {
    return {vectors.data() + static_cast<std::size_t>(j) * size, static_cast<std::size_t>(size)};
  }
};

ModeEigensystem eigendecompose_mode(const ModeOperator& op);
ModeEigensystem eigendecompose_mode(geometry::MeshPtr mesh, int k);

/// Eigensystems of every mode; realises spectral functions of -Delta.
class ModeSpectra {
 public:
  ModeSpectra(geometry::MeshPtr mesh, int max_mode);
  const ModeEigensystem& mode(int k) const { return systems_.at(static_cast<std::size_t>(k)); }
  int max_mode() const noexcept { return static_cast<int>(systems_.size()) - 1; }
  const geometry::MeshPtr& mesh_ptr() const noexcept { return mesh_; }

  /// Pooled eigenvalues over modes with angular multiplicity, ascending.
  std::vector<double> pooled(int count) const;

  /// Applies the multiplier m(mu) to every component of u in the eigenbasis.
  template <class Fn>
  Field apply_multiplier(const Field& u, Fn&& multiplier) const;

  /// (-A)^alpha u with A = -(1 - Delta)^2, i.e. multiplier (1 + mu)^{2 alpha}.
  Field fractional_power(double alpha, const Field& u) const;

 private:
  void apply_mode(int k, std::span<const double> in, std::span<double> out,
                  const std::vector<double>& multipliers) const;

  geometry::MeshPtr mesh_;
  std::vector<ModeEigensystem> systems_;
};

template <class Fn>
Field ModeSpectra::apply_multiplier(const Field& u, Fn&& multiplier) const {
  if (u.mesh_ptr() != mesh_) throw ValidationError("field mesh differs from spectra mesh");
  Field out = u.zeros_like();
  for (int c = 0; c < u.components(); ++c) {
    const int k = Field::mode_of(c);
    const auto& sys = mode(k);
    std::vector<double> m(sys.values.size());
    for (std::size_t j = 0; j < m.size(); ++j) m[j] = multiplier(sys.values[j]);
    apply_mode(k, u.component(c), out.component(c), m);
  }
  return out;
}

Field fractional_power_apply(double alpha, const Field& u, const ModeSpectra& spectra);

/// max over eigenvalues mu and sample times t of
/// t^alpha e^{delta t} (1 + mu)^{2 alpha} e^{-t (1 + mu)^2}.
double semigroup_decay_sup(double alpha, double delta, std::span<const double> eigenvalues,
                           std::span<const double> times);

}  // namespace conekit::ops
