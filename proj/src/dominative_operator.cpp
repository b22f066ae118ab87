#include "dplap/dominative_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dplap/error.hpp"
#include "dplap/parallel.hpp"

namespace dplap {
namespace {

std::string where(const Grid& g, Index i) {
  const Coord x = g.coord(i);
  std::string s = "(";
  for (int k = 0; k < x.size(); ++k) s += (k ? "," : "") + std::to_string(x[k]);
  return s + ")";
}

MultiIndex neg(const MultiIndex& s) { return {-s[0], -s[1], -s[2]}; }

MultiIndex axis(int k) {
  MultiIndex s{0, 0, 0};
  s[k] = 1;
  return s;
}

double axis_second_difference(const GridFunction& u, Index x, int k) {
  const Grid& g = u.grid();
  const double h = g.h();
  return (u[g.shifted(x, axis(k))] + u[g.shifted(x, neg(axis(k)))] - 2.0 * u[x]) / (h * h);
}

double cross_difference(const GridFunction& u, Index x, int a, int b) {
  const Grid& g = u.grid();
  const double h = g.h();
  MultiIndex pp{0, 0, 0}, pm{0, 0, 0};
  pp[a] = 1;
  pp[b] = 1;
  pm[a] = 1;
  pm[b] = -1;
  return (u[g.shifted(x, pp)] - u[g.shifted(x, pm)] - u[g.shifted(x, neg(pm))] + u[g.shifted(x, neg(pp))]) /
         (4.0 * h * h);
}

void require_interior(const Grid& g, Index x) {
  if (x < 0 || x >= g.size() || !g.is_interior(x)) throw InvalidArgument("point is not an interior lattice point");
}

}  // namespace

std::string to_string(Scheme s) { return s == Scheme::wide_stencil ? "wide-stencil" : "explicit-2d"; }

Scheme scheme_from_string(const std::string& name) {
  if (name == "wide-stencil") return Scheme::wide_stencil;
  if (name == "explicit-2d") return Scheme::explicit_2d;
  throw InvalidArgument("unknown scheme '" + name + "'");
}

OperatorParams::OperatorParams(double p, StencilSet directions, Scheme scheme)
    : p_(p), directions_(std::move(directions)), scheme_(scheme) {
  if (!(p >= 2.0) || !std::isfinite(p)) throw InvalidArgument("p must be >= 2");
  if (scheme == Scheme::explicit_2d && directions_.dim() != 2) {
    throw InvalidArgument("explicit-2d scheme requires dimension 2");
  }
}

OperatorParams::OperatorParams(double p, int dim, Scheme scheme)
    : OperatorParams(p, StencilSet::default_for(dim), scheme) {}

StencilTable::StencilTable(std::shared_ptr<const Grid> grid, StencilSet directions)
    : grid_(std::move(grid)), directions_(std::move(directions)), lines_(directions_.lines()) {
  if (directions_.dim() != grid_->dim()) throw InvalidArgument("stencil and grid dimensions differ");
  const double h = grid_->h();
  for (const auto& d : directions_.directions()) weight_.push_back(1.0 / (h * h * d.norm * d.norm));
  const auto& interior = grid_->interior();
  nb_.assign(interior.size() * static_cast<std::size_t>(lines_) * 2, -1);
  for (std::size_t k = 0; k < interior.size(); ++k) {
    const Index x = interior[k];
    bool any = false;
    for (int j = 0; j < lines_; ++j) {
      const auto& s = directions_[j].step;
      const Index up = grid_->shifted(x, s);
      const Index down = grid_->shifted(x, neg(s));
      if (up < 0 || down < 0 || !grid_->is_active(up) || !grid_->is_active(down)) continue;
      nb_[(k * lines_ + j) * 2] = up;
      nb_[(k * lines_ + j) * 2 + 1] = down;
      any = true;
    }
    if (!any) throw StencilStarved(where(*grid_, x));
  }
}

DominativeOperator::DominativeOperator(std::shared_ptr<const Grid> g, const OperatorParams& params)
    : table_(std::move(g), params.directions()), p_(params.p()) {
  if (params.scheme() != Scheme::wide_stencil) {
    throw InvalidArgument("DominativeOperator implements the wide-stencil scheme only");
  }
  for (std::size_t k = 0; k < table_.points(); ++k) {
    for (int a = 0; a < grid().dim(); ++a) {
      if (!table_.admissible(k, a)) throw StencilStarved(where(grid(), grid().interior()[k]));
    }
  }
}

double DominativeOperator::laplacian(std::span<const double> u, std::size_t k) const {
  double s = 0.0;
  for (int a = 0; a < grid().dim(); ++a) s += second_difference(u, k, a);
  return s;
}

double DominativeOperator::lambda_max(std::span<const double> u, std::size_t k, int* argmax) const {
  double best = -std::numeric_limits<double>::infinity();
  int best_line = -1;
  for (int j = 0; j < table_.lines(); ++j) {
    if (!table_.admissible(k, j)) continue;
    const double d = second_difference(u, k, j);
    if (d > best) {
      best = d;
      best_line = j;
    }
  }
  if (argmax) *argmax = best_line;
  return best;
}

double lambda_max_stencil(const GridFunction& u, Index x, const StencilSet& directions) {
  const Grid& g = u.grid();
  require_interior(g, x);
  if (directions.dim() != g.dim()) throw InvalidArgument("stencil and grid dimensions differ");
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& d : directions.directions()) {
    const Index up = g.shifted(x, d.step);
    const Index down = g.shifted(x, neg(d.step));
    if (up < 0 || down < 0 || !g.is_active(up) || !g.is_active(down)) continue;
    const double hh = g.h() * d.norm;
    best = std::max(best, (u[up] + u[down] - 2.0 * u[x]) / (hh * hh));
    any = true;
  }
  if (!any) throw StencilStarved(where(g, x));
  return best;
}

GridFunction dp_apply(const GridFunction& u, const OperatorParams& params) {
  if (params.scheme() == Scheme::explicit_2d) return dp_explicit_2d(u, params.p());
  DominativeOperator op(u.grid_ptr(), params);
  GridFunction out(u.grid_ptr());
  const auto& interior = u.grid().interior();
  const auto vals = u.values();
  auto dst = out.values();
  parallel_for(interior.size(), [&](std::size_t k) { dst[interior[k]] = op.apply(vals, k); });
  return out;
}

GridFunction dp_explicit_2d(const GridFunction& u, double p) {
  if (u.grid().dim() != 2) throw InvalidArgument("dp_explicit_2d requires dimension 2");
  if (!(p >= 2.0)) throw InvalidArgument("p must be >= 2");
  GridFunction out(u.grid_ptr());
  for (Index x : u.grid().interior()) {
    const double uxx = axis_second_difference(u, x, 0);
    const double uyy = axis_second_difference(u, x, 1);
    const double uxy = cross_difference(u, x, 0, 1);
    out[x] = 0.5 * p * (uxx + uyy) + 0.5 * (p - 2.0) * std::sqrt((uxx - uyy) * (uxx - uyy) + 4.0 * uxy * uxy);
  }
  return out;
}

SymMatrix discrete_hessian(const GridFunction& u, Index x) {
  const Grid& g = u.grid();
  require_interior(g, x);
  const int n = g.dim();
  SmallMatrix hess(n, n);
  for (int a = 0; a < n; ++a) {
    hess(a, a) = axis_second_difference(u, x, a);
    for (int b = a + 1; b < n; ++b) hess(a, b) = hess(b, a) = cross_difference(u, x, a, b);
  }
  return SymMatrix(hess);
}

std::optional<double> normalized_p_laplacian(const GridFunction& u, Index x, double p) {
  if (!(p >= 2.0)) throw InvalidArgument("p must be >= 2");
  const Grid& g = u.grid();
  require_interior(g, x);
  const int n = g.dim();
  const double h = g.h();
  Coord grad(n);
  for (int a = 0; a < n; ++a) grad[a] = (u[g.shifted(x, axis(a))] - u[g.shifted(x, neg(axis(a)))]) / (2.0 * h);
  double scale = 0.0;
  for (Index i : g.interior()) scale = std::max(scale, std::abs(u[i]));
  for (Index i : g.boundary()) scale = std::max(scale, std::abs(u[i]));
  const double gnorm = grad.norm();
  if (!(gnorm >= 1e-12 * scale / h) || gnorm == 0.0) return std::nullopt;
  const SymMatrix hess = discrete_hessian(u, x);
  return hess.trace() + (p - 2.0) * hess.quadratic_form(grad) / (gnorm * gnorm);
}

}  // namespace dplap
