#pragma once

// Function-space quantities evaluated on discrete fields: means, weighted
// Mellin-Sobolev norms near the tip, H^1 seminorm, the dual norm of mean-zero
// H^1 and the Poincare-Wirtinger constant.

#include <functional>
#include <vector>

#include "conekit/field.hpp"
#include "conekit/geometry.hpp"

namespace conekit::spaces {

/// Cut-off omega: 1 on [0, a], 0 on [b, L], cubic smoothstep in between.
/// `collar_only` selects the indicator convention: omega = 1 on [0, a], the
/// norm is the collar term alone and the cut-off is not differentiated.
struct CutoffFunction {
  double a = 0.4;
  double b = 0.8;
  bool collar_only = false;

  static CutoffFunction smoothstep(double a, double b);
  /// [0.4 min(1, L), 0.8 min(1, L)].
  static CutoffFunction default_for(const geometry::SurfaceProfile& profile);
  static CutoffFunction collar_indicator(double x_max = 1.0);

  double operator()(double s) const;
};

double area(const Field& u);
double mean(const Field& u);
/// u minus its mean.
Field mean_projected(const Field& u);

/// Integer-order Mellin-Sobolev norm (order s in {0, 1, 2}) with n = 1:
/// collar term sum_{j+alpha<=s} int x^{-2 gamma} |(x d_x)^j (k^alpha) (omega u)_k|^2 f dx dtheta
/// (collar chart x = s on (0, min(1, L))) plus the discrete H^s norm of
/// (1 - omega) u.
double mellin_norm(const Field& u, int order, double gamma, const CutoffFunction& omega);

struct MellinNormReport {
  double value = 0.0;  // +inf when divergent
  bool divergent = false;
  std::vector<int> cells;
  std::vector<double> sequence;
};

/// Evaluates the norm of make_field(mesh) on meshes with M, 2M and 4M cells.
/// The sequence is flagged divergent when it increases strictly and the growth
/// of the squared norm per unit of log(1 / h_tip) has not contracted below 3/4.
MellinNormReport mellin_norm_refined(const std::function<Field(geometry::MeshPtr)>& make_field,
                                     std::shared_ptr<const geometry::SurfaceProfile> profile, int cells,
                                     double grading, int order, double gamma, const CutoffFunction& omega);

/// sqrt(-<L u, u>): face differences plus the angular term k^2 / f^2.
double h1_seminorm(const Field& u);
/// sqrt(||u||^2 + |u|_1^2).
double h1_norm(const Field& u);
/// (integral of u^4)^{1/4}, evaluated on the dealiased angular grid.
double l4_norm(const Field& u);

/// Mean-zero psi with -Delta psi = v; v must be mean-zero.
Field inverse_laplacian(const Field& v);
/// ||grad psi|| with -Delta psi = v, mean(psi) = 0. Requires |mean(v)| <= 1e-10 ||v||_inf.
double h01_dual_norm(const Field& v);

/// Smallest `count` eigenvalues of -L_k (values only).
std::vector<double> smallest_eigenvalues(const geometry::MeshPtr& mesh, int k, int count);
/// Smallest non-zero eigenvalue of -Delta over modes 0..K.
double first_nonzero_eigenvalue(const geometry::MeshPtr& mesh, int max_mode);
/// 1 / sqrt(mu_1): best constant in ||u - mean(u)|| <= C ||grad u||.
double poincare_constant(const geometry::MeshPtr& mesh, int max_mode);

}  // namespace conekit::spaces
