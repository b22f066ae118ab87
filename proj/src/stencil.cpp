#include "dplap/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "dplap/error.hpp"

namespace dplap {
namespace {

Direction make_direction(int a, int b, int c) {
  Direction d;
  d.step = {a, b, c};
  d.norm = std::sqrt(static_cast<double>(a * a + b * b + c * c));
  return d;
}

// Shortest primitive (a, b) with b > 0 or (b == 0, a > 0) whose angle is within
// `slack` of `theta` in [0, pi).
Direction closest_lattice_direction(double theta, double slack) {
  constexpr int kReach = 64;
  Direction best;
  double best_norm = std::numeric_limits<double>::infinity();
  double best_err = std::numeric_limits<double>::infinity();
  for (int b = 0; b <= kReach; ++b) {
    for (int a = -kReach; a <= kReach; ++a) {
      if (b == 0 && a <= 0) continue;
      if (std::gcd(std::abs(a), b) != 1) continue;
      const double ang = std::atan2(static_cast<double>(b), static_cast<double>(a));
      const double err = std::abs(ang - theta);
      if (err > slack) continue;
      const double norm = std::hypot(a, b);
      if (norm < best_norm - 1e-12 || (std::abs(norm - best_norm) <= 1e-12 && err < best_err)) {
        best = make_direction(a, b, 0);
        best_norm = norm;
        best_err = err;
      }
    }
  }
  if (!std::isfinite(best_norm)) throw InvalidArgument("direction count too large for the lattice search");
  return best;
}

}  // namespace

StencilSet StencilSet::axes(int dim) {
  if (dim < 1 || dim > 3) throw InvalidArgument("stencil dimension must be 1, 2 or 3");
  std::vector<Direction> lines;
  for (int k = 0; k < dim; ++k) {
    MultiIndex s{0, 0, 0};
    s[k] = 1;
    lines.push_back(make_direction(s[0], s[1], s[2]));
  }
  return StencilSet(dim, std::move(lines));
}

StencilSet StencilSet::default_for(int dim) {
  switch (dim) {
    case 1: return axes(1);
    case 2: return with_directions(2, 16);
    case 3: return with_directions(3, 26);
    default: throw InvalidArgument("stencil dimension must be 1, 2 or 3");
  }
}

StencilSet StencilSet::with_directions(int dim, int count) {
  if (dim == 1) {
    if (count != 2) throw InvalidArgument("1D stencils have exactly 2 directions");
    return axes(1);
  }
  if (dim == 3) {
    if (count != 26) throw InvalidArgument("3D stencils have exactly 26 directions (13 lines)");
    std::vector<Direction> lines = axes(3).lines_;
    // Face diagonals, then space diagonals.
    const int face[6][3] = {{1, 1, 0}, {1, -1, 0}, {1, 0, 1}, {1, 0, -1}, {0, 1, 1}, {0, 1, -1}};
    for (const auto& f : face) lines.push_back(make_direction(f[0], f[1], f[2]));
    const int space[4][3] = {{1, 1, 1}, {1, 1, -1}, {1, -1, 1}, {1, -1, -1}};
    for (const auto& s : space) lines.push_back(make_direction(s[0], s[1], s[2]));
    return StencilSet(3, std::move(lines));
  }
  if (dim != 2) throw InvalidArgument("stencil dimension must be 1, 2 or 3");
  if (count < 8 || count % 4 != 0) {
    throw InvalidArgument("2D direction count must be a multiple of 4 and at least 8");
  }
  const int n_lines = count / 2;
  const double spacing = std::numbers::pi / n_lines;
  std::vector<Direction> lines = axes(2).lines_;
  for (int k = 1; k < n_lines; ++k) {
    if (2 * k == n_lines) continue;  // y axis, already present
    lines.push_back(closest_lattice_direction(k * spacing, 0.25 * spacing + 1e-12));
  }
  return StencilSet(2, std::move(lines));
}

double StencilSet::angular_resolution() const {
  if (dim_ == 1) return 0.0;
  if (dim_ != 2) throw InvalidArgument("angular resolution is defined for 2D stencils");
  std::vector<double> angles;
  for (const auto& d : lines_) {
    angles.push_back(std::atan2(static_cast<double>(d.step[1]), static_cast<double>(d.step[0])));
  }
  std::sort(angles.begin(), angles.end());
  double gap = angles.front() + std::numbers::pi - angles.back();
  for (std::size_t i = 1; i < angles.size(); ++i) gap = std::max(gap, angles[i] - angles[i - 1]);
  return 0.5 * gap;
}

}  // namespace dplap
