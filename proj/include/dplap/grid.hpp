#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dplap/domain.hpp"

namespace dplap {

using Index = std::ptrdiff_t;
using MultiIndex = std::array<int, 3>;

enum class PointClass : std::uint8_t { exterior = 0, interior = 1, boundary = 2 };

std::string to_string(PointClass c);

/// Uniform Cartesian lattice over the bounding box of a domain.
///
/// Lattice points strictly inside the domain are interior. Non-interior points
/// that touch an interior point (any of the 3^n - 1 lattice neighbors, so
/// within h*sqrt(n) of the boundary) are boundary points and carry Dirichlet
/// data. Everything else is exterior.
class Grid {
 public:
  int dim() const noexcept { return dim_; }
  double h() const noexcept { return h_; }
  const Coord& origin() const noexcept { return origin_; }
  const MultiIndex& extent() const noexcept { return extent_; }
  Index size() const noexcept { return static_cast<Index>(cls_.size()); }
  bool domain_convex() const noexcept { return domain_convex_; }

  PointClass cls(Index i) const { return cls_[static_cast<std::size_t>(i)]; }
  bool is_interior(Index i) const { return cls(i) == PointClass::interior; }
  bool is_active(Index i) const { return cls(i) != PointClass::exterior; }

  const std::vector<Index>& interior() const noexcept { return interior_; }
  const std::vector<Index>& boundary() const noexcept { return boundary_; }

  MultiIndex multi(Index i) const;
  Index flat(const MultiIndex& m) const;
  bool in_lattice(const MultiIndex& m) const;
  Coord coord(Index i) const;
  Coord coord(const MultiIndex& m) const;

  /// Lattice index of i + step, or -1 when that falls off the lattice.
  Index shifted(Index i, const MultiIndex& step) const;

  /// Nearest lattice point to x (not necessarily active), or -1 if off-lattice.
  Index locate(const Coord& x) const;

 private:
  friend Grid build_grid(const DomainSpec& domain, double h);

  int dim_ = 0;
  double h_ = 0.0;
  Coord origin_;
  MultiIndex extent_{1, 1, 1};
  std::array<Index, 3> stride_{0, 0, 0};
  bool domain_convex_ = true;
  std::vector<PointClass> cls_;
  std::vector<Index> interior_;
  std::vector<Index> boundary_;
};

/// Throws GridTooCoarse when no lattice point lies inside the domain.
Grid build_grid(const DomainSpec& domain, double h);

/// Values on the active (interior + boundary) lattice points of a grid.
///
/// Storage is dense over the lattice; exterior slots are NaN and are never
/// read by the library.
class GridFunction {
 public:
  GridFunction() = default;
  /// Zero on every active point.
  explicit GridFunction(std::shared_ptr<const Grid> grid);

  template <class F>
  static GridFunction sample(std::shared_ptr<const Grid> grid, F&& f) {
    GridFunction g(std::move(grid));
    for (Index i = 0; i < g.grid().size(); ++i) {
      if (g.grid().is_active(i)) g.values_[static_cast<std::size_t>(i)] = f(g.grid().coord(i));
    }
    return g;
  }

  const Grid& grid() const noexcept { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const noexcept { return grid_; }

  double operator[](Index i) const { return values_[static_cast<std::size_t>(i)]; }
  double& operator[](Index i) { return values_[static_cast<std::size_t>(i)]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  /// Max |value| over interior points.
  double max_abs_interior() const;
  double max_interior() const;

  /// Sets every boundary point to `value`.
  void set_boundary(double value);

  GridFunction& operator*=(double c);

 private:
  std::shared_ptr<const Grid> grid_;
  std::vector<double> values_;
};

/// One row per active point: coordinate columns, class, value.
void write_csv(std::ostream& os, const GridFunction& g);
void write_csv(const std::string& path, const GridFunction& g);

}  // namespace dplap
