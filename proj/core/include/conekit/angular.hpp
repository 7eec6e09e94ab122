#pragma once

#include <span>
#include <vector>

#include "conekit/field.hpp"

namespace conekit {

/// Real FFT between angular coefficients (modes 0..K) and an equispaced theta
/// grid on every radial cell. The grid has at least 4K+1 points, so cubic
/// products projected back onto modes <= K and the quartic angular mean are
/// free of aliasing.
///
/// Not thread-safe: each thread needs its own instance.
class AngularGrid {
 public:
  AngularGrid(int max_mode, int cells);
  ~AngularGrid();
  AngularGrid(const AngularGrid&) = delete;
  AngularGrid& operator=(const AngularGrid&) = delete;
  AngularGrid(AngularGrid&& other) noexcept;
  AngularGrid& operator=(AngularGrid&&) = delete;

  int points() const noexcept { return points_; }
  int cells() const noexcept { return cells_; }
  int max_mode() const noexcept { return max_mode_; }

  /// grid[i * points() + j] = u(s_i, 2 pi j / points()).
  void to_grid(const Field& u, std::span<double> grid);
  /// Projects grid values onto modes 0..K (overwrites u).
  void from_grid(std::span<const double> grid, Field& u);

  static int grid_size_for(int max_mode);

 private:
  int max_mode_;
  int cells_;
  int points_;
  double* real_ = nullptr;
  void* spectrum_ = nullptr;
  void* forward_ = nullptr;
  void* backward_ = nullptr;
};

}  // namespace conekit
