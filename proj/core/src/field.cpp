#include "conekit/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "conekit/error.hpp"

namespace conekit {

Field::Field(geometry::MeshPtr mesh, int max_mode) : mesh_(std::move(mesh)), max_mode_(max_mode) {
  if (!mesh_) throw ValidationError("field requires a mesh");
  if (max_mode < 0) throw ValidationError("mode cutoff K must be >= 0");
  cells_ = mesh_->size();
  data_.assign(static_cast<std::size_t>(components()) * static_cast<std::size_t>(cells_), 0.0);
}

Field Field::constant(geometry::MeshPtr mesh, int max_mode, double value) {
  Field u(std::move(mesh), max_mode);
  std::ranges::fill(u.component(0), value);
  return u;
}

Field Field::from_function(geometry::MeshPtr mesh, int max_mode,
                           const std::function<double(double, double)>& fn) {
  Field u(std::move(mesh), max_mode);
  const int n = 4 * max_mode + 4;
  std::vector<double> samples(static_cast<std::size_t>(n));
  const auto& s = u.mesh().centers();
  for (int i = 0; i < u.cells_; ++i) {
    for (int j = 0; j < n; ++j) {
      samples[static_cast<std::size_t>(j)] = fn(s[static_cast<std::size_t>(i)], 2.0 * std::numbers::pi * j / n);
    }
    for (int k = 0; k <= max_mode; ++k) {
      double ac = 0.0;
      double as = 0.0;
      for (int j = 0; j < n; ++j) {
        const double th = 2.0 * std::numbers::pi * j / n;
        ac += samples[static_cast<std::size_t>(j)] * std::cos(k * th);
        as += samples[static_cast<std::size_t>(j)] * std::sin(k * th);
      }
      if (k == 0) {
        u.component(0)[static_cast<std::size_t>(i)] = ac / n;
      } else {
        u.component(cos_component(k))[static_cast<std::size_t>(i)] = 2.0 * ac / n;
        u.component(sin_component(k))[static_cast<std::size_t>(i)] = 2.0 * as / n;
      }
    }
  }
  return u;
}

Field Field::radial_mode(geometry::MeshPtr mesh, int max_mode, int k, bool sine,
                         const std::function<double(double)>& g) {
  if (k < 0 || k > max_mode) throw ValidationError("mode index out of range");
  if (k == 0 && sine) throw ValidationError("mode 0 has no sine part");
  Field u(std::move(mesh), max_mode);
  auto comp = u.component(sine ? sin_component(k) : cos_component(k));
  const auto& s = u.mesh().centers();
  for (std::size_t i = 0; i < comp.size(); ++i) comp[i] = g(s[i]);
  return u;
}

void Field::require_compatible(const Field& other) const {
  if (mesh_ != other.mesh_) throw ValidationError("fields are defined on different meshes");
  if (max_mode_ != other.max_mode_) throw ValidationError("fields carry different mode cutoffs");
}

double Field::value(int i, double theta) const {
  double v = component(0)[static_cast<std::size_t>(i)];
  for (int k = 1; k <= max_mode_; ++k) {
    v += component(cos_component(k))[static_cast<std::size_t>(i)] * std::cos(k * theta) +
         component(sin_component(k))[static_cast<std::size_t>(i)] * std::sin(k * theta);
  }
  return v;
}

Field& Field::operator+=(const Field& other) {
  require_compatible(other);
  for (std::size_t j = 0; j < data_.size(); ++j) data_[j] += other.data_[j];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_compatible(other);
  for (std::size_t j = 0; j < data_.size(); ++j) data_[j] -= other.data_[j];
  return *this;
}

Field& Field::operator*=(double a) {
  for (double& x : data_) x *= a;
  return *this;
}

double inner_product(const Field& u, const Field& v) {
  u.require_compatible(v);
  const auto& vol = u.mesh().volumes();
  double total = 0.0;
  for (int c = 0; c < u.components(); ++c) {
    const auto a = u.component(c);
    const auto b = v.component(c);
    double part = 0.0;
    for (std::size_t i = 0; i < vol.size(); ++i) part += vol[i] * a[i] * b[i];
    total += Field::angular_weight(c) * part;
  }
  return total;
}

double l2_norm(const Field& u) { return std::sqrt(std::max(0.0, inner_product(u, u))); }

double max_coefficient(const Field& u) {
  double m = 0.0;
  for (double x : u.data()) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace conekit
