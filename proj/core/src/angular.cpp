#include "conekit/angular.hpp"

#include <algorithm>
#include <mutex>

#include <fftw3.h>

#include "conekit/error.hpp"

namespace conekit {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_smooth(int n) {
  for (int p : {2, 3, 5}) {
    while (n % p == 0) n /= p;
  }
  return n == 1;
}

}  // namespace

int AngularGrid::grid_size_for(int max_mode) {
  int n = std::max(2, 4 * max_mode + 1);
  while (n % 2 != 0 || !is_smooth(n)) ++n;
  return n;
}

AngularGrid::AngularGrid(int max_mode, int cells)
    : max_mode_(max_mode), cells_(cells), points_(grid_size_for(max_mode)) {
  if (max_mode < 0 || cells <= 0) throw ValidationError("angular grid needs K >= 0 and cells > 0");
  const int half = points_ / 2 + 1;
  real_ = fftw_alloc_real(static_cast<std::size_t>(points_) * static_cast<std::size_t>(cells_));
  auto* spec = fftw_alloc_complex(static_cast<std::size_t>(half) * static_cast<std::size_t>(cells_));
  spectrum_ = spec;
  std::lock_guard lock(planner_mutex());
  // FFTW_ESTIMATE keeps the chosen algorithm, and hence every output bit, reproducible.
  forward_ = fftw_plan_many_dft_r2c(1, &points_, cells_, real_, nullptr, 1, points_, spec, nullptr, 1,
                                    half, FFTW_ESTIMATE);
  backward_ = fftw_plan_many_dft_c2r(1, &points_, cells_, spec, nullptr, 1, half, real_, nullptr, 1,
                                     points_, FFTW_ESTIMATE);
  if (!forward_ || !backward_) throw NumericalError("FFTW planning failed");
}

AngularGrid::AngularGrid(AngularGrid&& other) noexcept
    : max_mode_(other.max_mode_),
      cells_(other.cells_),
      points_(other.points_),
      real_(other.real_),
      spectrum_(other.spectrum_),
      forward_(other.forward_),
      backward_(other.backward_) {
  other.real_ = nullptr;
  other.spectrum_ = nullptr;
  other.forward_ = nullptr;
  other.backward_ = nullptr;
}

AngularGrid::~AngularGrid() {
  std::lock_guard lock(planner_mutex());
  if (forward_) fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  if (backward_) fftw_destroy_plan(static_cast<fftw_plan>(backward_));
  if (real_) fftw_free(real_);
  if (spectrum_) fftw_free(spectrum_);
}

void AngularGrid::to_grid(const Field& u, std::span<double> grid) {
  if (u.max_mode() != max_mode_ || u.cells() != cells_) throw ValidationError("field does not match angular grid");
  const int half = points_ / 2 + 1;
  auto* spec = static_cast<fftw_complex*>(spectrum_);
  std::fill(reinterpret_cast<double*>(spec), reinterpret_cast<double*>(spec) + 2 * half * cells_, 0.0);
  for (int i = 0; i < cells_; ++i) {
    fftw_complex* row = spec + static_cast<std::ptrdiff_t>(i) * half;
    row[0][0] = u.component(0)[static_cast<std::size_t>(i)];
    for (int k = 1; k <= max_mode_; ++k) {
      row[k][0] = 0.5 * u.component(Field::cos_component(k))[static_cast<std::size_t>(i)];
      row[k][1] = -0.5 * u.component(Field::sin_component(k))[static_cast<std::size_t>(i)];
    }
  }
  fftw_execute(static_cast<fftw_plan>(backward_));
  std::copy(real_, real_ + static_cast<std::ptrdiff_t>(points_) * cells_, grid.begin());
}

void AngularGrid::from_grid(std::span<const double> grid, Field& u) {
  if (u.max_mode() != max_mode_ || u.cells() != cells_) throw ValidationError("field does not match angular grid");
  std::copy(grid.begin(), grid.begin() + static_cast<std::ptrdiff_t>(points_) * cells_, real_);
  fftw_execute(static_cast<fftw_plan>(forward_));
  const int half = points_ / 2 + 1;
  const double inv = 1.0 / points_;
  const auto* spec = static_cast<const fftw_complex*>(spectrum_);
  for (int i = 0; i < cells_; ++i) {
    const fftw_complex* row = spec + static_cast<std::ptrdiff_t>(i) * half;
    u.component(0)[static_cast<std::size_t>(i)] = row[0][0] * inv;
    for (int k = 1; k <= max_mode_; ++k) {
      u.component(Field::cos_component(k))[static_cast<std::size_t>(i)] = 2.0 * row[k][0] * inv;
      u.component(Field::sin_component(k))[static_cast<std::size_t>(i)] = -2.0 * row[k][1] * inv;
    }
  }
}

}  // namespace conekit
