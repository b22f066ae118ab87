#pragma once

#include <vector>

#include "dplap/grid.hpp"
#include "dplap/stencil.hpp"

namespace dplap {

/// Optional restriction of the envelope to a subset of the active points
/// (indexed like the lattice). Region points whose full lattice neighborhood
/// stays in the region are free; the rest are held at their input values.
using RegionMask = std::vector<bool>;

enum class EnvelopeMethod {
  /// Exact lower hulls along every stencil line, cycled to a fixpoint.
  line_hull,
  /// Pointwise obstacle update w <- min(v, min_e mean(w(x+he), w(x-he))).
  jacobi,
};

struct EnvelopeOptions {
  EnvelopeMethod method = EnvelopeMethod::line_hull;
  /// Compute on grids over nonconvex domains instead of refusing.
  bool allow_nonconvex = false;
  const RegionMask* region = nullptr;
  /// Full passes before giving up; 0 picks a default.
  int max_iterations = 0;
};

struct EnvelopeResult {
  GridFunction envelope;
  /// max over region points of v - envelope.
  double gap = 0.0;
  int iterations = 0;
};

/// Largest function below v that is convex along every admissible stencil
/// triple (x - he, x, x + he), with held points kept at v. Iterates until a
/// pass changes no value by more than tol.
EnvelopeResult convex_envelope(const GridFunction& v, const StencilSet& directions, double tol,
                               const EnvelopeOptions& options = {});

double envelope_gap(const GridFunction& v, const StencilSet& directions, double tol,
                    const EnvelopeOptions& options = {});

/// Region points that are free to move, in lattice order.
std::vector<Index> free_points(const Grid& grid, const RegionMask* region);

inline bool region_member(const Grid& grid, const RegionMask* region, Index i) {
  return grid.is_active(i) && (!region || (*region)[static_cast<std::size_t>(i)]);
}

/// Smallest w(x+he) + w(x-he) - 2w(x) over free points x and admissible lines.
double min_directional_second_difference(const GridFunction& w, const StencilSet& directions,
                                         const RegionMask* region = nullptr);

}  // namespace dplap
