#pragma once

// Model conic surfaces of revolution, their graded radial meshes, metric cell
// volumes and the spectrum of the cross-section circle at the tip.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace conekit {

class Field;

namespace geometry {

enum class ProfileKind { sphere, cone_capped, spindle };
enum class TipType { conic, smooth_pole };

std::string_view to_string(ProfileKind kind);
ProfileKind parse_profile_kind(std::string_view name);

struct TipEnd {
  TipType type = TipType::smooth_pole;
  double opening = 1.0;  // |f'(L)|
};

/// Exact small rational p/q; used to keep indicial arithmetic exact.
struct RationalValue {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const RationalValue&, const RationalValue&) = default;
};

/// Returns p/q with q <= max_den when double(p)/double(q) reproduces x exactly.
std::optional<RationalValue> recover_rational(double x, std::int64_t max_den = 1000000);

/// Surface of revolution with a conic tip at s = 0 and a closing end at s = L.
///
/// The radius function f is one of three closed forms:
///   sphere(R)          f = R sin(s/R), L = pi R, opening 1, smooth pole at L
///   cone_capped(c, L)  f = c s on [0, L/3], spherical cap on [2L/3, L],
///                      quintic smoothstep blend in between
///   spindle(c, c2, L)  f = c s near 0 and c2 (L - s) near L, same blend
class SurfaceProfile {
 public:
  ProfileKind kind() const noexcept { return kind_; }
  const std::vector<double>& parameters() const noexcept { return params_; }
  double length() const noexcept { return length_; }
  /// Cone opening c = f'(0+).
  double opening() const noexcept { return opening_; }
  const TipEnd& far_end() const noexcept { return far_end_; }

  double radius(double s) const;
  double radius_derivative(double s) const;

  /// Reference surface area: closed form for the sphere, adaptive
  /// Gauss-Kronrod quadrature of 2 pi f otherwise.
  double area() const;

  friend SurfaceProfile build_profile(ProfileKind kind, std::span<const double> params);

 private:
  SurfaceProfile() = default;

  ProfileKind kind_ = ProfileKind::sphere;
  std::vector<double> params_;
  double length_ = 0.0;
  double opening_ = 1.0;
  TipEnd far_end_;
  double cap_radius_ = 0.0;  // cone_capped only
};

/// params: sphere {R}; cone_capped {c, L}; spindle {c, c2, L}.
SurfaceProfile build_profile(ProfileKind kind, std::span<const double> params);

/// Laplacian spectrum of the tip cross-section (circle with metric c^2 dtheta^2).
struct BoundarySpectrum {
  struct Entry {
    int mode = 0;              // angular index k
    double lambda = 0.0;       // -(k/c)^2
    int multiplicity = 1;      // 1 for k = 0, 2 otherwise
    std::optional<RationalValue> exact;  // lambda as a rational when known
  };
  std::vector<Entry> entries;  // sorted: 0 = lambda_0 > lambda_1 >= ...

  /// Entries expanded by multiplicity: [0, l1, l1, l2, l2, ...].
  std::vector<double> expanded() const;
  /// Greatest non-zero eigenvalue, or 0 if there is none.
  double lambda_one() const;
  bool is_exact() const;
};

BoundarySpectrum boundary_spectrum(double opening, int max_mode);
BoundarySpectrum boundary_spectrum(RationalValue opening, int max_mode);
BoundarySpectrum boundary_spectrum(const SurfaceProfile& profile, int max_mode);
/// Spectrum from an explicit eigenvalue list (used for higher-dimensional
/// cross-sections); modes are numbered by list position.
BoundarySpectrum boundary_spectrum_from_eigenvalues(std::span<const double> lambdas,
                                                    std::span<const int> multiplicities = {});

/// Cell-centred radial grid on [0, L] with metric cell volumes.
class RadialMesh {
 public:
  int size() const noexcept { return static_cast<int>(centers_.size()); }
  const std::vector<double>& faces() const noexcept { return faces_; }
  const std::vector<double>& centers() const noexcept { return centers_; }
  /// 2 pi * integral of f over each cell.
  const std::vector<double>& volumes() const noexcept { return volumes_; }
  const std::vector<double>& face_radius() const noexcept { return face_radius_; }
  const std::vector<double>& center_radius() const noexcept { return center_radius_; }
  double width(int i) const { return faces_[i + 1] - faces_[i]; }
  double grading() const noexcept { return grading_; }
  double area() const noexcept { return area_; }
  double length() const noexcept { return faces_.back(); }
  double min_center() const noexcept { return centers_.front(); }
  const SurfaceProfile& profile() const noexcept { return *profile_; }
  std::shared_ptr<const SurfaceProfile> profile_ptr() const noexcept { return profile_; }

  friend std::shared_ptr<const RadialMesh> build_mesh(std::shared_ptr<const SurfaceProfile>,
                                                      int, double);

 private:
  RadialMesh() = default;

  std::shared_ptr<const SurfaceProfile> profile_;
  std::vector<double> faces_;
  std::vector<double> centers_;
  std::vector<double> volumes_;
  std::vector<double> face_radius_;
  std::vector<double> center_radius_;
  double grading_ = 1.0;
  double area_ = 0.0;
};

using MeshPtr = std::shared_ptr<const RadialMesh>;

/// Smallest width ratio (relative to the uniform width) of the geometric zone.
inline constexpr double kGradingFloor = 1e-3;
inline constexpr int kMinCells = 4;

/// Faces shrink by `grading` per cell towards each conic tip until the width
/// reaches kGradingFloor times the uniform width; the rest is uniform.
MeshPtr build_mesh(std::shared_ptr<const SurfaceProfile> profile, int cells, double grading);
MeshPtr build_mesh(const SurfaceProfile& profile, int cells, double grading);

/// Sum of vol_i times the angular mean (mode 0) of u.
double integrate(const RadialMesh& mesh, const Field& u);

}  // namespace geometry
}  // namespace conekit
