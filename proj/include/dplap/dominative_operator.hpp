#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dplap/grid.hpp"
#include "dplap/stencil.hpp"
#include "dplap/sym_matrix.hpp"

namespace dplap {

enum class Scheme { wide_stencil, explicit_2d };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& name);

/// p >= 2 plus the discretization choices. p is validated on construction.
class OperatorParams {
 public:
  OperatorParams(double p, StencilSet directions, Scheme scheme = Scheme::wide_stencil);
  /// Default stencil for `dim`.
  OperatorParams(double p, int dim, Scheme scheme = Scheme::wide_stencil);

  double p() const noexcept { return p_; }
  Scheme scheme() const noexcept { return scheme_; }
  const StencilSet& directions() const noexcept { return directions_; }

 private:
  double p_;
  StencilSet directions_;
  Scheme scheme_;
};

/// Neighbor table of a stencil on a grid: for every interior point and every
/// line e, the lattice indices of x + h e and x - h e, or -1 when either end
/// point is exterior (the direction is then dropped at that point).
class StencilTable {
 public:
  StencilTable(std::shared_ptr<const Grid> grid, StencilSet directions);

  const Grid& grid() const noexcept { return *grid_; }
  const StencilSet& directions() const noexcept { return directions_; }
  int lines() const noexcept { return lines_; }
  std::size_t points() const noexcept { return grid_->interior().size(); }

  /// k is the position in grid().interior().
  Index plus(std::size_t k, int line) const { return nb_[(k * lines_ + line) * 2]; }
  Index minus(std::size_t k, int line) const { return nb_[(k * lines_ + line) * 2 + 1]; }
  bool admissible(std::size_t k, int line) const { return plus(k, line) >= 0; }
  /// 1 / (h |e|)^2
  double weight(int line) const { return weight_[static_cast<std::size_t>(line)]; }

 private:
  std::shared_ptr<const Grid> grid_;
  StencilSet directions_;
  int lines_;
  std::vector<Index> nb_;
  std::vector<double> weight_;
};

/// Wide-stencil discretization of D_p u = Laplacian(u) + (p - 2) lambda_max(D^2 u).
///
/// The Laplacian uses axis second differences and lambda_max is the largest
/// directional second difference over the admissible stencil lines. Both are
/// nondecreasing in the neighbor values and nonincreasing in the center value,
/// so the scheme is monotone.
class DominativeOperator {
 public:
  DominativeOperator(std::shared_ptr<const Grid> grid, const OperatorParams& params);

  const StencilTable& table() const noexcept { return table_; }
  const Grid& grid() const noexcept { return table_.grid(); }
  double p() const noexcept { return p_; }

  /// Directional second difference along `line` at interior slot k.
  double second_difference(std::span<const double> u, std::size_t k, int line) const {
    const Index c = grid().interior()[k];
    return (u[table_.plus(k, line)] + u[table_.minus(k, line)] - 2.0 * u[c]) * table_.weight(line);
  }

  double laplacian(std::span<const double> u, std::size_t k) const;
  /// Max directional second difference; the maximizing line (first index on
  /// ties) is written to *argmax when non-null.
  double lambda_max(std::span<const double> u, std::size_t k, int* argmax = nullptr) const;
  double apply(std::span<const double> u, std::size_t k, int* argmax = nullptr) const {
    return laplacian(u, k) + (p_ - 2.0) * lambda_max(u, k, argmax);
  }

 private:
  StencilTable table_;
  double p_;
};

/// max over e in S of (u(x+he) - 2u(x) + u(x-he)) / (h|e|)^2 at interior point x.
double lambda_max_stencil(const GridFunction& u, Index x, const StencilSet& directions);

/// D_p^h u at every interior point; zero at boundary points.
GridFunction dp_apply(const GridFunction& u, const OperatorParams& params);

/// 2D closed form (p/2) Lap u + ((p-2)/2) sqrt((u_xx - u_yy)^2 + 4 u_xy^2) with
/// central and four-point cross differences.
GridFunction dp_explicit_2d(const GridFunction& u, double p);

/// Normalized p-Laplacian Lap u + (p-2) <grad u, D^2u grad u> / |grad u|^2 by
/// central differences. Empty when the gradient is degenerate
/// (|grad u| < 1e-12 * max|u| / h).
std::optional<double> normalized_p_laplacian(const GridFunction& u, Index x, double p);

/// Central-difference Hessian at interior point x.
SymMatrix discrete_hessian(const GridFunction& u, Index x);

}  // namespace dplap
