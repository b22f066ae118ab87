#pragma once

#include <vector>

#include "dplap/grid.hpp"

namespace dplap {

/// Integer lattice direction e; the stencil uses both +e and -e.
struct Direction {
  MultiIndex step{0, 0, 0};
  double norm = 1.0;  // Euclidean |e|
};

/// Pairwise non-parallel lattice directions spanning R^n. The first dim()
/// entries are always the coordinate axes.
///
/// Sizes are counted in signed directions (each line contributes +e and -e),
/// so the 2D default of 16 directions is 8 lines at roughly pi/8 spacing.
class StencilSet {
 public:
  /// Axis directions only.
  static StencilSet axes(int dim);
  /// 1D: the axis. 2D: 16 directions. 3D: the 13 lines through the
  /// neighbors of the unit cube (26 directions).
  static StencilSet default_for(int dim);
  /// 2D: `count` signed directions, count a multiple of 4 and >= 8. Line k
  /// targets angle k*pi/L (L = count/2) and uses the shortest primitive lattice
  /// vector within pi/(4L) of it. Other dimensions accept only their default
  /// count.
  static StencilSet with_directions(int dim, int count);

  int dim() const noexcept { return dim_; }
  int count() const noexcept { return 2 * static_cast<int>(lines_.size()); }
  int lines() const noexcept { return static_cast<int>(lines_.size()); }
  const Direction& operator[](int k) const { return lines_[static_cast<std::size_t>(k)]; }
  const std::vector<Direction>& directions() const noexcept { return lines_; }

  /// Largest angular distance from any unit vector to the nearest line
  /// (2D only; 0 for 1D).
  double angular_resolution() const;

 private:
  StencilSet(int dim, std::vector<Direction> lines) : dim_(dim), lines_(std::move(lines)) {}

  int dim_ = 0;
  std::vector<Direction> lines_;
};

}  // namespace dplap
