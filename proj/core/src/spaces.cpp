#include "conekit/spaces.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <lapacke.h>

#include "conekit/angular.hpp"
#include "conekit/cone_operators.hpp"
#include "conekit/error.hpp"

namespace conekit::spaces {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

// Derivative at x0 of the quadratic through three points.
double quadratic_slope(double x0, double xa, double ya, double xb, double yb, double xc, double yc) {
  return ya * (2.0 * x0 - xb - xc) / ((xa - xb) * (xa - xc)) +
         yb * (2.0 * x0 - xa - xc) / ((xb - xa) * (xb - xc)) +
         yc * (2.0 * x0 - xa - xb) / ((xc - xa) * (xc - xb));
}

// x d/dx at cell centres: centred three-point stencil, one-sided at both ends.
std::vector<double> euler_derivative(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  std::vector<double> out(idx(n), 0.0);
  if (n < 3) return out;
  for (int i = 0; i < n; ++i) {
    const int c = std::clamp(i, 1, n - 2);
    out[idx(i)] = x[idx(i)] * quadratic_slope(x[idx(i)], x[idx(c - 1)], y[idx(c - 1)], x[idx(c)], y[idx(c)],
                                              x[idx(c + 1)], y[idx(c + 1)]);
  }
  return out;
}

// integral of f over [lo, hi] by three-point Gauss-Legendre.
double radius_integral(const geometry::SurfaceProfile& p, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  static constexpr std::array<double, 3> nodes{-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr std::array<double, 3> weights{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double total = 0.0;
  for (std::size_t g = 0; g < 3; ++g) total += weights[g] * p.radius(mid + half * nodes[g]);
  return total * half;
}

double pointwise_sup(const Field& u) {
  double sup = 0.0;
  for (int i = 0; i < u.cells(); ++i) {
    double v = 0.0;
    for (int c = 0; c < u.components(); ++c) v += std::abs(u.component(c)[idx(i)]);
    sup = std::max(sup, v);
  }
  return sup;
}

}  // namespace

CutoffFunction CutoffFunction::smoothstep(double a, double b) {
  if (!(a >= 0.0 && b > a)) throw ValidationError("cut-off transition interval must satisfy 0 <= a < b");
  return {a, b, false};
}

CutoffFunction CutoffFunction::default_for(const geometry::SurfaceProfile& profile) {
  const double x = std::min(1.0, profile.length());
  return smoothstep(0.4 * x, 0.8 * x);
}

CutoffFunction CutoffFunction::collar_indicator(double x_max) {
  if (!(x_max > 0.0)) throw ValidationError("collar extent must be positive");
  return {x_max, x_max, true};
}

double CutoffFunction::operator()(double s) const {
  if (s <= a) return 1.0;
  if (s >= b) return 0.0;
  const double t = (s - a) / (b - a);
  return 1.0 - t * t * (3.0 - 2.0 * t);
}

double area(const Field& u) { return u.mesh().area(); }

double mean(const Field& u) { return geometry::integrate(u.mesh(), u) / u.mesh().area(); }

Field mean_projected(const Field& u) {
  Field out = u;
  // A second pass removes what the first leaves behind when u is nearly constant.
  for (int pass = 0; pass < 2; ++pass) {
    const double m = mean(out);
    for (double& x : out.component(0)) x -= m;
  }
  return out;
}

double mellin_norm(const Field& u, int order, double gamma, const CutoffFunction& omega) {
  if (order < 0 || order > 2) throw ValidationError("Mellin norm order must be 0, 1 or 2");
  const auto& mesh = u.mesh();
  const auto& profile = mesh.profile();
  const int m = mesh.size();
  const double x_collar = std::min(1.0, mesh.length());
  const double x_limit = omega.collar_only ? std::min(omega.a, x_collar) : x_collar;
  const auto& s = mesh.centers();
  const auto& faces = mesh.faces();

  // Collar cells and their f-weights restricted to (0, x_limit).
  int ncol = 0;
  while (ncol < m && faces[idx(ncol)] < x_limit) ++ncol;
  std::vector<double> xs(s.begin(), s.begin() + ncol);
  std::vector<double> weight(idx(ncol));
  for (int i = 0; i < ncol; ++i) {
    weight[idx(i)] = radius_integral(profile, faces[idx(i)], std::min(faces[idx(i) + 1], x_limit));
  }
  std::vector<double> cut(idx(ncol));
  for (int i = 0; i < ncol; ++i) cut[idx(i)] = omega.collar_only ? 1.0 : omega(xs[idx(i)]);

  double collar = 0.0;
  for (int c = 0; c < u.components(); ++c) {
    const double k = Field::mode_of(c);
    const auto comp = u.component(c);
    std::vector<double> w(idx(ncol));
    for (int i = 0; i < ncol; ++i) w[idx(i)] = cut[idx(i)] * comp[idx(i)];
    std::array<std::vector<double>, 3> deriv;
    deriv[0] = w;
    if (order >= 1) deriv[1] = euler_derivative(xs, deriv[0]);
    if (order >= 2) deriv[2] = euler_derivative(xs, deriv[1]);
    double part = 0.0;
    for (int i = 0; i < ncol; ++i) {
      double sum = 0.0;
      for (int j = 0; j <= order; ++j) {
        double angular = 0.0;
        for (int alpha = 0; alpha + j <= order; ++alpha) angular += std::pow(k, 2.0 * alpha);
        sum += angular * deriv[idx(j)][idx(i)] * deriv[idx(j)][idx(i)];
      }
      part += std::pow(xs[idx(i)], -2.0 * gamma) * weight[idx(i)] * sum;
    }
    collar += kTwoPi * Field::angular_weight(c) * part;
  }

  double interior = 0.0;
  if (!omega.collar_only) {
    Field rest = u;
    for (int c = 0; c < rest.components(); ++c) {
      auto comp = rest.component(c);
      for (int i = 0; i < m; ++i) comp[idx(i)] *= 1.0 - omega(s[idx(i)]);
    }
    interior = inner_product(rest, rest);
    if (order >= 1) interior += std::pow(h1_seminorm(rest), 2);
    if (order >= 2) {
      const Field lap = ops::apply_laplacian(rest);
      interior += inner_product(lap, lap);
    }
  }
  return std::sqrt(collar + interior);
}

MellinNormReport mellin_norm_refined(const std::function<Field(geometry::MeshPtr)>& make_field,
                                     std::shared_ptr<const geometry::SurfaceProfile> profile, int cells,
                                     double grading, int order, double gamma, const CutoffFunction& omega) {
  MellinNormReport report;
  std::array<double, 3> log_h{};
  for (int level = 0; level < 3; ++level) {
    const int m = cells << level;
    const auto mesh = geometry::build_mesh(profile, m, grading);
    report.cells.push_back(m);
    report.sequence.push_back(mellin_norm(make_field(mesh), order, gamma, omega));
    log_h[idx(level)] = std::log(mesh->width(0));
  }
  // Squared increments per unit of log(1 / h_tip): constant for a logarithmic
  // divergence, growing for a power one, contracting geometrically otherwise.
  const auto& v = report.sequence;
  const double d1 = v[1] - v[0];
  const double d2 = v[2] - v[1];
  const double r1 = (v[1] * v[1] - v[0] * v[0]) / (log_h[0] - log_h[1]);
  const double r2 = (v[2] * v[2] - v[1] * v[1]) / (log_h[1] - log_h[2]);
  report.divergent = d1 > 1e-12 * std::abs(v[0]) && d2 > 0.0 && r2 >= 0.75 * r1;
  report.value = report.divergent ? std::numeric_limits<double>::infinity() : v[2];
  return report;
}

double h1_seminorm(const Field& u) {
  const auto& mesh = u.mesh();
  const int m = mesh.size();
  const auto& s = mesh.centers();
  const auto& ff = mesh.face_radius();
  const auto& fc = mesh.center_radius();
  const auto& vol = mesh.volumes();
  double total = 0.0;
  for (int c = 0; c < u.components(); ++c) {
    const double k = Field::mode_of(c);
    const auto a = u.component(c);
    double part = 0.0;
    for (int j = 1; j < m; ++j) {
      const double d = a[idx(j)] - a[idx(j - 1)];
      part += kTwoPi * ff[idx(j)] / (s[idx(j)] - s[idx(j - 1)]) * d * d;
    }
    if (k > 0) {
      for (int i = 0; i < m; ++i) part += vol[idx(i)] * (k * k) / (fc[idx(i)] * fc[idx(i)]) * a[idx(i)] * a[idx(i)];
    }
    total += Field::angular_weight(c) * part;
  }
  return std::sqrt(total);
}

double h1_norm(const Field& u) {
  const double semi = h1_seminorm(u);
  return std::sqrt(inner_product(u, u) + semi * semi);
}

double l4_norm(const Field& u) {
  AngularGrid grid(u.max_mode(), u.cells());
  std::vector<double> values(static_cast<std::size_t>(grid.points()) * idx(u.cells()));
  grid.to_grid(u, values);
  const auto& vol = u.mesh().volumes();
  double total = 0.0;
  for (int i = 0; i < u.cells(); ++i) {
    double row = 0.0;
    for (int j = 0; j < grid.points(); ++j) {
      const double x = values[idx(i) * idx(grid.points()) + idx(j)];
      row += x * x * x * x;
    }
    total += vol[idx(i)] * row / grid.points();
  }
  return std::pow(total, 0.25);
}

Field inverse_laplacian(const Field& v) {
  const Field centred = mean_projected(v);
  Field psi = v.zeros_like();
  for (int c = 0; c < v.components(); ++c) {
    const ops::ModeOperator op(v.mesh_ptr(), Field::mode_of(c));
    const auto sol = ops::solve_helmholtz(op, 0.0, 1.0, centred.component(c));
    std::copy(sol.begin(), sol.end(), psi.component(c).begin());
  }
  return psi;
}

double h01_dual_norm(const Field& v) {
  const double m = mean(v);
  const double sup = pointwise_sup(v);
  if (std::abs(m) > 1e-10 * sup) {
    throw ValidationError("h01_dual_norm requires a mean-zero field: |mean| = " + std::to_string(std::abs(m)) +
                          " exceeds 1e-10 ||v||_inf");
  }
  if (sup == 0.0) return 0.0;
  return h1_seminorm(inverse_laplacian(v));
}

std::vector<double> smallest_eigenvalues(const geometry::MeshPtr& mesh, int k, int count) {
  const ops::ModeOperator op(mesh, k);
  const int n = op.size();
  count = std::clamp(count, 1, n);
  std::vector<double> d(idx(n));
  std::vector<double> e(idx(n), 0.0);
  for (int i = 0; i < n; ++i) d[idx(i)] = -op.diag()[idx(i)];
  for (int i = 0; i + 1 < n; ++i) e[idx(i)] = -op.sym_off()[idx(i)];
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

double first_nonzero_eigenvalue(const geometry::MeshPtr& mesh, int max_mode) {
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= max_mode; ++k) {
    const auto w = smallest_eigenvalues(mesh, k, k == 0 ? 2 : 1);
    best = std::min(best, k == 0 ? w[1] : w[0]);
  }
  return best;
}

double poincare_constant(const geometry::MeshPtr& mesh, int max_mode) {
  return 1.0 / std::sqrt(first_nonzero_eigenvalue(mesh, max_mode));
}

}  // namespace conekit::spaces
