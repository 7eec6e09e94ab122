#include "conekit/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "conekit/error.hpp"
#include "conekit/field.hpp"

namespace conekit::geometry {

namespace {

constexpr double kPi = std::numbers::pi;

// Quintic smoothstep: C^2 with vanishing first and second derivatives at 0, 1.
double smoothstep5(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

double smoothstep5_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return 30.0 * t * t * (t - 1.0) * (t - 1.0);
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ValidationError(std::string("profile parameter ") + name + " must be positive and finite");
  }
}

}  // namespace

std::string_view to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::sphere:
      return "sphere";
    case ProfileKind::cone_capped:
      return "cone_capped";
    case ProfileKind::spindle:
      return "spindle";
  }
  return "unknown";
}

ProfileKind parse_profile_kind(std::string_view name) {
  if (name == "sphere") return ProfileKind::sphere;
  if (name == "cone_capped") return ProfileKind::cone_capped;
  if (name == "spindle") return ProfileKind::spindle;
  throw ValidationError("unknown profile kind '" + std::string(name) +
                        "' (expected sphere, cone_capped or spindle)");
}

std::optional<RationalValue> recover_rational(double x, std::int64_t max_den) {
  if (!std::isfinite(x)) return std::nullopt;
  // Continued-fraction convergents.
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_real = std::floor(r);
    if (std::abs(a_real) > 9e15) break;
    const auto a = static_cast<std::int64_t>(a_real);
    const std::int64_t p2 = a * p1 + p0;
    const std::int64_t q2 = a * q1 + q0;
    if (q2 > max_den || q2 <= 0) break;
    if (static_cast<double>(p2) / static_cast<double>(q2) == x) return RationalValue{p2, q2};
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double frac = r - a_real;
    if (frac == 0.0) break;
    r = 1.0 / frac;
  }
  return std::nullopt;
}

double SurfaceProfile::radius(double s) const {
  const double L = length_;
  s = std::clamp(s, 0.0, L);
  switch (kind_) {
    case ProfileKind::sphere: {
      const double R = params_[0];
      return R * std::sin(s / R);
    }
    case ProfileKind::cone_capped: {
      const double c = params_[0];
      const double cone = c * s;
      const double cap = cap_radius_ * std::sin((L - s) / cap_radius_);
      const double w = smoothstep5((s - L / 3.0) / (L / 3.0));
      return (1.0 - w) * cone + w * cap;
    }
    case ProfileKind::spindle: {
      const double c = params_[0];
      const double c2 = params_[1];
      const double w = smoothstep5((s - L / 3.0) / (L / 3.0));
      return (1.0 - w) * c * s + w * c2 * (L - s);
    }
  }
  return 0.0;
}

double SurfaceProfile::radius_derivative(double s) const {
  const double L = length_;
  s = std::clamp(s, 0.0, L);
  switch (kind_) {
    case ProfileKind::sphere:
      return std::cos(s / params_[0]);
    case ProfileKind::cone_capped: {
      const double c = params_[0];
      const double t = (s - L / 3.0) / (L / 3.0);
      const double w = smoothstep5(t);
      const double dw = smoothstep5_derivative(t) * 3.0 / L;
      const double cap = cap_radius_ * std::sin((L - s) / cap_radius_);
      const double dcap = -std::cos((L - s) / cap_radius_);
      return (1.0 - w) * c + w * dcap + dw * (cap - c * s);
    }
    case ProfileKind::spindle: {
      const double c = params_[0];
      const double c2 = params_[1];
      const double t = (s - L / 3.0) / (L / 3.0);
      const double w = smoothstep5(t);
      const double dw = smoothstep5_derivative(t) * 3.0 / L;
      return (1.0 - w) * c - w * c2 + dw * (c2 * (L - s) - c * s);
    }
  }
  return 0.0;
}

double SurfaceProfile::area() const {
  if (kind_ == ProfileKind::sphere) {
    const double R = params_[0];
    return 4.0 * kPi * R * R;
  }
  using Integrator = boost::math::quadrature::gauss_kronrod<double, 61>;
  const auto f = [this](double s) { return radius(s); };
  const double L = length_;
  double total = 0.0;
  for (int piece = 0; piece < 3; ++piece) {
    total += Integrator::integrate(f, piece * L / 3.0, (piece + 1) * L / 3.0, 15, 1e-15);
  }
  return 2.0 * kPi * total;
}

SurfaceProfile build_profile(ProfileKind kind, std::span<const double> params) {
  SurfaceProfile p;
  p.kind_ = kind;
  p.params_.assign(params.begin(), params.end());
  switch (kind) {
    case ProfileKind::sphere:
      if (params.size() != 1) throw ValidationError("sphere expects one parameter (radius)");
      require_positive(params[0], "radius");
      p.length_ = kPi * params[0];
      p.opening_ = 1.0;
      p.far_end_ = {TipType::smooth_pole, 1.0};
      break;
    case ProfileKind::cone_capped:
      if (params.size() != 2) throw ValidationError("cone_capped expects two parameters (c, L)");
      require_positive(params[0], "c");
      require_positive(params[1], "L");
      p.length_ = params[1];
      p.opening_ = params[0];
      p.far_end_ = {TipType::smooth_pole, 1.0};
      // Cap spans a quarter circle over [L/3, L]: positive on the whole blend.
      p.cap_radius_ = 4.0 * params[1] / (3.0 * kPi);
      break;
    case ProfileKind::spindle:
      if (params.size() != 3) throw ValidationError("spindle expects three parameters (c, c2, L)");
      require_positive(params[0], "c");
      require_positive(params[1], "c2");
      require_positive(params[2], "L");
      p.length_ = params[2];
      p.opening_ = params[0];
      p.far_end_ = {TipType::conic, params[1]};
      break;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Boundary spectrum

std::vector<double> BoundarySpectrum::expanded() const {
  std::vector<double> out;
  for (const auto& e : entries) out.insert(out.end(), static_cast<std::size_t>(e.multiplicity), e.lambda);
  return out;
}

double BoundarySpectrum::lambda_one() const {
  for (const auto& e : entries) {
    if (e.lambda < 0.0) return e.lambda;
  }
  return 0.0;
}

bool BoundarySpectrum::is_exact() const {
  return std::all_of(entries.begin(), entries.end(), [](const Entry& e) { return e.exact.has_value(); });
}

BoundarySpectrum boundary_spectrum(RationalValue opening, int max_mode) {
  if (max_mode < 0) throw ValidationError("mode cutoff K must be >= 0");
  if (opening.num <= 0 || opening.den <= 0) throw ValidationError("cone opening must be positive");
  BoundarySpectrum spec;
  for (int k = 0; k <= max_mode; ++k) {
    BoundarySpectrum::Entry e;
    e.mode = k;
    const double kc = static_cast<double>(k) * static_cast<double>(opening.den) /
                      static_cast<double>(opening.num);
    e.lambda = -kc * kc;
    e.multiplicity = k == 0 ? 1 : 2;
    const std::int64_t num = static_cast<std::int64_t>(k) * opening.den;
    e.exact = RationalValue{-num * num, opening.num * opening.num};
    if (k == 0) e.exact = RationalValue{0, 1};
    spec.entries.push_back(e);
  }
  return spec;
}

BoundarySpectrum boundary_spectrum(double opening, int max_mode) {
  if (max_mode < 0) throw ValidationError("mode cutoff K must be >= 0");
  if (!(opening > 0.0)) throw ValidationError("cone opening must be positive");
  if (auto r = recover_rational(opening, 1000)) return boundary_spectrum(*r, max_mode);
  BoundarySpectrum spec;
  for (int k = 0; k <= max_mode; ++k) {
    const double kc = k / opening;
    spec.entries.push_back({k, -kc * kc, k == 0 ? 1 : 2, std::nullopt});
  }
  return spec;
}

BoundarySpectrum boundary_spectrum(const SurfaceProfile& profile, int max_mode) {
  return boundary_spectrum(profile.opening(), max_mode);
}

BoundarySpectrum boundary_spectrum_from_eigenvalues(std::span<const double> lambdas,
                                                    std::span<const int> multiplicities) {
  if (!multiplicities.empty() && multiplicities.size() != lambdas.size()) {
    throw ValidationError("multiplicity list must match eigenvalue list");
  }
  BoundarySpectrum spec;
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    if (lambdas[j] > 0.0) throw ValidationError("boundary eigenvalues must be nonpositive");
    BoundarySpectrum::Entry e;
    e.mode = static_cast<int>(j);
    e.lambda = lambdas[j];
    e.multiplicity = multiplicities.empty() ? 1 : multiplicities[j];
    e.exact = recover_rational(lambdas[j], 1000000);
    spec.entries.push_back(e);
  }
  std::stable_sort(spec.entries.begin(), spec.entries.end(),
                   [](const auto& a, const auto& b) { return a.lambda > b.lambda; });
  return spec;
}

// ---------------------------------------------------------------------------
// Mesh

namespace {

// Widths of a zone graded towards its start: geometric ratio q over n cells,
// followed by uniform cells of width h.
std::vector<double> graded_widths(int cells, double q, bool both_ends) {
  std::vector<double> rel(static_cast<std::size_t>(cells), 1.0);
  if (q >= 1.0) return rel;
  const int max_graded = static_cast<int>(std::floor(std::log(kGradingFloor) / std::log(q)));
  const int available = both_ends ? (cells - 1) / 2 : cells - 1;
  const int graded = std::clamp(max_graded, 0, available);
  for (int j = 0; j < graded; ++j) {
    const double w = std::pow(q, graded - j);
    rel[static_cast<std::size_t>(j)] = w;
    if (both_ends) rel[static_cast<std::size_t>(cells - 1 - j)] = w;
  }
  return rel;
}

}  // namespace

MeshPtr build_mesh(std::shared_ptr<const SurfaceProfile> profile, int cells, double grading) {
  if (!profile) throw ValidationError("mesh requires a profile");
  if (cells < kMinCells) {
    throw ValidationError("mesh needs at least " + std::to_string(kMinCells) + " cells");
  }
  if (!(grading > 0.0 && grading <= 1.0)) throw ValidationError("grading ratio q must lie in (0, 1]");

  const double L = profile->length();
  const bool both = profile->far_end().type == TipType::conic;
  const std::vector<double> rel = graded_widths(cells, grading, both);
  double total = 0.0;
  for (double w : rel) total += w;

  auto mesh = std::shared_ptr<RadialMesh>(new RadialMesh());
  mesh->profile_ = profile;
  mesh->grading_ = grading;
  mesh->faces_.resize(static_cast<std::size_t>(cells) + 1);
  mesh->faces_[0] = 0.0;
  double acc = 0.0;
  for (int i = 0; i < cells; ++i) {
    acc += rel[static_cast<std::size_t>(i)];
    mesh->faces_[static_cast<std::size_t>(i) + 1] = L * acc / total;
  }
  mesh->faces_.back() = L;

  double min_width = L;
  for (int i = 0; i < cells; ++i) min_width = std::min(min_width, mesh->width(i));
  if (!(min_width >= 1e-14 * L)) {
    throw ValidationError("mesh cell width underflows (smallest width < 1e-14 L); reduce grading");
  }

  // Three-point Gauss-Legendre on each cell.
  static constexpr std::array<double, 3> nodes{-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr std::array<double, 3> weights{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  mesh->centers_.resize(static_cast<std::size_t>(cells));
  mesh->volumes_.resize(static_cast<std::size_t>(cells));
  mesh->center_radius_.resize(static_cast<std::size_t>(cells));
  mesh->face_radius_.resize(static_cast<std::size_t>(cells) + 1);
  double area = 0.0;
  for (int i = 0; i < cells; ++i) {
    const double a = mesh->faces_[static_cast<std::size_t>(i)];
    const double b = mesh->faces_[static_cast<std::size_t>(i) + 1];
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double vol = 0.0;
    for (std::size_t g = 0; g < 3; ++g) vol += weights[g] * profile->radius(mid + half * nodes[g]);
    vol *= 2.0 * kPi * half;
    mesh->centers_[static_cast<std::size_t>(i)] = mid;
    mesh->volumes_[static_cast<std::size_t>(i)] = vol;
    mesh->center_radius_[static_cast<std::size_t>(i)] = profile->radius(mid);
    area += vol;
  }
  for (int i = 0; i <= cells; ++i) {
    mesh->face_radius_[static_cast<std::size_t>(i)] = profile->radius(mesh->faces_[static_cast<std::size_t>(i)]);
  }
  // Closed surfaces: the end faces carry no circumference.
  mesh->face_radius_.front() = 0.0;
  mesh->face_radius_.back() = 0.0;
  mesh->area_ = area;
  return mesh;
}

MeshPtr build_mesh(const SurfaceProfile& profile, int cells, double grading) {
  return build_mesh(std::make_shared<const SurfaceProfile>(profile), cells, grading);
}

double integrate(const RadialMesh& mesh, const Field& u) {
  if (&u.mesh() != &mesh) throw ValidationError("field is defined on a different mesh");
  const auto a0 = u.component(0);
  const auto& vol = mesh.volumes();
  double total = 0.0;
  for (std::size_t i = 0; i < vol.size(); ++i) total += vol[i] * a0[i];
  return total;
}

}  // namespace conekit::geometry
