#pragma once

#include <functional>
#include <span>
#include <vector>

#include "conekit/geometry.hpp"

namespace conekit {

/// Real scalar field stored as angular Fourier coefficients per radial cell:
///   u(s_i, theta) = a_0(i) + sum_{k=1..K} a_k(i) cos(k theta) + b_k(i) sin(k theta).
/// Component c = 0 holds a_0, c = 2k-1 holds a_k and c = 2k holds b_k.
class Field {
 public:
  /// Empty field without a mesh; only assignable.
  Field() = default;
  Field(geometry::MeshPtr mesh, int max_mode);

  static Field constant(geometry::MeshPtr mesh, int max_mode, double value);
  /// Projection of u(s, theta) sampled at cell centres onto modes 0..K.
  static Field from_function(geometry::MeshPtr mesh, int max_mode,
                             const std::function<double(double, double)>& u);
  /// Single angular component with radial profile g(s): g(s) cos(k theta), or
  /// g(s) sin(k theta) when `sine` is set.
  static Field radial_mode(geometry::MeshPtr mesh, int max_mode, int k, bool sine,
                           const std::function<double(double)>& g);

  const geometry::RadialMesh& mesh() const noexcept { return *mesh_; }
  const geometry::MeshPtr& mesh_ptr() const noexcept { return mesh_; }
  int max_mode() const noexcept { return max_mode_; }
  int cells() const noexcept { return cells_; }
  int components() const noexcept { return 2 * max_mode_ + 1; }

  static int mode_of(int component) noexcept { return (component + 1) / 2; }
  /// Angular L2 weight of a component relative to 2 pi (1 for mode 0, 1/2 otherwise).
  static double angular_weight(int component) noexcept { return component == 0 ? 1.0 : 0.5; }
  static int cos_component(int k) noexcept { return k == 0 ? 0 : 2 * k - 1; }
  static int sin_component(int k) noexcept { return 2 * k; }

  std::span<double> component(int c) {
    return {data_.data() + static_cast<std::size_t>(c) * cells_, static_cast<std::size_t>(cells_)};
  }
  std::span<const double> component(int c) const {
    return {data_.data() + static_cast<std::size_t>(c) * cells_, static_cast<std::size_t>(cells_)};
  }
  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool compatible(const Field& other) const noexcept {
    return mesh_ == other.mesh_ && max_mode_ == other.max_mode_;
  }
  /// Throws ValidationError when the fields live on different meshes or mode sets.
  void require_compatible(const Field& other) const;

  /// Point value at cell i and angle theta.
  double value(int i, double theta) const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double a);
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double a, Field u) { return u *= a; }
  friend Field operator*(Field u, double a) { return u *= a; }

  /// Copy with all entries zeroed.
  Field zeros_like() const { return Field(mesh_, max_mode_); }

 private:
  geometry::MeshPtr mesh_;
  int max_mode_ = 0;
  int cells_ = 0;
  std::vector<double> data_;
};

/// L2(dmu_g) inner product computed from the coefficients.
double inner_product(const Field& u, const Field& v);
double l2_norm(const Field& u);
/// Largest absolute coefficient (not a pointwise maximum).
double max_coefficient(const Field& u);

}  // namespace conekit
