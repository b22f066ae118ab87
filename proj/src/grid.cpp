#include "dplap/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "dplap/error.hpp"
#include "dplap/format.hpp"

namespace dplap {

std::string to_string(PointClass c) {
  switch (c) {
    case PointClass::exterior: return "exterior";
    case PointClass::interior: return "interior";
    case PointClass::boundary: return "boundary";
  }
  return "?";
}

MultiIndex Grid::multi(Index i) const {
  MultiIndex m{0, 0, 0};
  for (int k = dim_ - 1; k >= 0; --k) {
    m[k] = static_cast<int>(i / stride_[k]);
    i -= static_cast<Index>(m[k]) * stride_[k];
  }
  return m;
}

Index Grid::flat(const MultiIndex& m) const {
  Index i = 0;
  for (int k = 0; k < dim_; ++k) i += static_cast<Index>(m[k]) * stride_[k];
  return i;
}

bool Grid::in_lattice(const MultiIndex& m) const {
  for (int k = 0; k < dim_; ++k) {
    if (m[k] < 0 || m[k] >= extent_[k]) return false;
  }
  return true;
}

Coord Grid::coord(const MultiIndex& m) const {
  Coord x(dim_);
  for (int k = 0; k < dim_; ++k) x[k] = origin_[k] + h_ * m[k];
  return x;
}

Coord Grid::coord(Index i) const { return coord(multi(i)); }

Index Grid::shifted(Index i, const MultiIndex& step) const {
  MultiIndex m = multi(i);
  for (int k = 0; k < dim_; ++k) m[k] += step[k];
  return in_lattice(m) ? flat(m) : -1;
}

Index Grid::locate(const Coord& x) const {
  MultiIndex m{0, 0, 0};
  for (int k = 0; k < dim_; ++k) m[k] = static_cast<int>(std::lround((x[k] - origin_[k]) / h_));
  return in_lattice(m) ? flat(m) : -1;
}

Grid build_grid(const DomainSpec& domain, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("grid spacing h must be positive");
  Grid g;
  g.dim_ = domain.dim();
  g.h_ = h;
  g.domain_convex_ = domain.convex();
  const Coord lo = domain.bbox_lo();
  const Coord hi = domain.bbox_hi();
  g.origin_ = lo.array() - h;
  Index total = 1;
  for (int k = 0; k < g.dim_; ++k) {
    const double cells = (hi[k] - lo[k]) / h;
    const auto n = static_cast<Index>(std::ceil(cells - 1e-9)) + 3;
    if (n > (Index{1} << 20)) throw InvalidArgument("grid spacing too small for domain extent");
    g.extent_[k] = static_cast<int>(n);
    g.stride_[k] = total;
    total *= n;
  }
  if (total > (Index{1} << 27)) throw InvalidArgument("grid has too many lattice points");
  g.cls_.assign(static_cast<std::size_t>(total), PointClass::exterior);

  const double inside_tol = 1e-10 * h;
  for (Index i = 0; i < total; ++i) {
    if (domain.signed_distance(g.coord(i)) < -inside_tol) {
      g.cls_[static_cast<std::size_t>(i)] = PointClass::interior;
      g.interior_.push_back(i);
    }
  }
  if (g.interior_.empty()) throw GridTooCoarse();

  // Moore neighborhood offsets.
  std::vector<MultiIndex> moore;
  const int span = g.dim_ == 1 ? 3 : g.dim_ == 2 ? 9 : 27;
  for (int code = 0; code < span; ++code) {
    MultiIndex s{0, 0, 0};
    int c = code;
    for (int k = 0; k < g.dim_; ++k) {
      s[k] = c % 3 - 1;
      c /= 3;
    }
    if (s != MultiIndex{0, 0, 0}) moore.push_back(s);
  }
  for (Index i : g.interior_) {
    for (const auto& s : moore) {
      const Index j = g.shifted(i, s);
      if (j < 0) continue;  // cannot happen with one padding layer
      auto& c = g.cls_[static_cast<std::size_t>(j)];
      if (c == PointClass::exterior) c = PointClass::boundary;
    }
  }
  for (Index i = 0; i < total; ++i) {
    if (g.cls_[static_cast<std::size_t>(i)] == PointClass::boundary) g.boundary_.push_back(i);
  }
  return g;
}

GridFunction::GridFunction(std::shared_ptr<const Grid> grid) : grid_(std::move(grid)) {
  values_.assign(static_cast<std::size_t>(grid_->size()), std::numeric_limits<double>::quiet_NaN());
  for (Index i : grid_->interior()) values_[static_cast<std::size_t>(i)] = 0.0;
  for (Index i : grid_->boundary()) values_[static_cast<std::size_t>(i)] = 0.0;
}

double GridFunction::max_abs_interior() const {
  double m = 0.0;
  for (Index i : grid_->interior()) m = std::max(m, std::abs((*this)[i]));
  return m;
}

double GridFunction::max_interior() const {
  double m = -std::numeric_limits<double>::infinity();
  for (Index i : grid_->interior()) m = std::max(m, (*this)[i]);
  return m;
}

void GridFunction::set_boundary(double value) {
  for (Index i : grid_->boundary()) (*this)[i] = value;
}

GridFunction& GridFunction::operator*=(double c) {
  for (Index i : grid_->interior()) (*this)[i] *= c;
  for (Index i : grid_->boundary()) (*this)[i] *= c;
  return *this;
}

void write_csv(std::ostream& os, const GridFunction& g) {
  const Grid& grid = g.grid();
  static constexpr const char* names[] = {"x", "y", "z"};
  for (int k = 0; k < grid.dim(); ++k) os << names[k] << ',';
  os << "class,value\n";
  for (Index i = 0; i < grid.size(); ++i) {
    if (!grid.is_active(i)) continue;
    const Coord x = grid.coord(i);
    for (int k = 0; k < grid.dim(); ++k) os << fmt_double(x[k]) << ',';
    os << to_string(grid.cls(i)) << ',' << fmt_double(g[i]) << '\n';
  }
}

void write_csv(const std::string& path, const GridFunction& g) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  write_csv(os, g);
}

}  // namespace dplap
