#include "dplap/convex_envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dplap/error.hpp"
#include "dplap/parallel.hpp"

namespace dplap {
namespace {

MultiIndex neg(const MultiIndex& s) { return {-s[0], -s[1], -s[2]}; }

std::vector<MultiIndex> moore_steps(int dim) {
  std::vector<MultiIndex> steps;
  const int r1 = dim >= 2 ? 1 : 0;
  const int r2 = dim >= 3 ? 1 : 0;
  for (int a = -1; a <= 1; ++a) {
    for (int b = -r1; b <= r1; ++b) {
      for (int c = -r2; c <= r2; ++c) {
        if (a != 0 || b != 0 || c != 0) steps.push_back({a, b, c});
      }
    }
  }
  return steps;
}

// Which points take part, and which of those may move.
struct Layout {
  std::vector<bool> member;
  std::vector<bool> free;
  std::vector<Index> free_points;
};

Layout make_layout(const Grid& g, const RegionMask* region) {
  if (region && static_cast<Index>(region->size()) != g.size()) {
    throw InvalidArgument("region mask size does not match the grid");
  }
  Layout lay;
  lay.member.assign(static_cast<std::size_t>(g.size()), false);
  lay.free.assign(static_cast<std::size_t>(g.size()), false);
  for (Index i = 0; i < g.size(); ++i) {
    lay.member[i] = region_member(g, region, i);
  }
  const auto steps = moore_steps(g.dim());
  for (Index i : g.interior()) {
    if (!lay.member[i]) continue;
    bool inside = true;
    if (region) {
      for (const auto& s : steps) {
        const Index j = g.shifted(i, s);
        if (j < 0 || !lay.member[j]) {
          inside = false;
          break;
        }
      }
    }
    if (inside) {
      lay.free[i] = true;
      lay.free_points.push_back(i);
    }
  }
  return lay;
}

void check_input(const GridFunction& v, const StencilSet& directions, double tol, const EnvelopeOptions& options,
                 const Layout& lay) {
  const Grid& g = v.grid();
  if (directions.dim() != g.dim()) throw InvalidArgument("stencil and grid dimensions differ");
  if (!(tol > 0.0)) throw InvalidArgument("envelope tolerance must be positive");
  if (!g.domain_convex() && !options.allow_nonconvex) {
    throw InvalidArgument("convex envelope requested on a nonconvex domain");
  }
  for (Index i = 0; i < g.size(); ++i) {
    if (lay.member[i] && !std::isfinite(v[i])) throw InvalidArgument("envelope input is not finite");
  }
}

// Maximal runs of consecutive member points along one lattice line.
std::vector<std::vector<Index>> line_runs(const Grid& g, const Layout& lay, const MultiIndex& step) {
  std::vector<std::vector<Index>> runs;
  const MultiIndex back = neg(step);
  for (Index i = 0; i < g.size(); ++i) {
    if (!lay.member[i]) continue;
    const Index prev = g.shifted(i, back);
    if (prev >= 0 && lay.member[prev]) continue;
    std::vector<Index> run;
    for (Index j = i; j >= 0 && lay.member[j]; j = g.shifted(j, step)) run.push_back(j);
    if (run.size() >= 3) runs.push_back(std::move(run));
  }
  return runs;
}

// Replaces y[a..b] by the lower convex hull of (t, y[t]) over that range; the
// endpoints stay put. Returns the largest decrease.
double hull_segment(std::vector<double>& y, std::size_t a, std::size_t b, std::vector<std::size_t>& stack) {
  if (b - a < 2) return 0.0;
  stack.clear();
  for (std::size_t t = a; t <= b; ++t) {
    while (stack.size() >= 2) {
      const std::size_t i = stack[stack.size() - 2];
      const std::size_t j = stack.back();
      // Drop j when it lies on or above the chord from i to t.
      const double cross = (static_cast<double>(j - i)) * (y[t] - y[i]) - (static_cast<double>(t - i)) * (y[j] - y[i]);
      if (cross <= 0.0) {
        stack.pop_back();
      } else {
        break;
      }
    }
    stack.push_back(t);
  }
  double change = 0.0;
  for (std::size_t s = 1; s < stack.size(); ++s) {
    const std::size_t i = stack[s - 1];
    const std::size_t j = stack[s];
    for (std::size_t t = i + 1; t < j; ++t) {
      const double lam = static_cast<double>(t - i) / static_cast<double>(j - i);
      const double val = (1.0 - lam) * y[i] + lam * y[j];
      if (val < y[t]) {
        change = std::max(change, y[t] - val);
        y[t] = val;
      }
    }
  }
  return change;
}

int line_hull(GridFunction& w, const StencilSet& directions, double tol, const Layout& lay, int max_passes) {
  const Grid& g = w.grid();
  std::vector<std::vector<std::vector<Index>>> runs;
  for (const auto& d : directions.directions()) runs.push_back(line_runs(g, lay, d.step));

  std::vector<double> y;
  std::vector<std::size_t> stack;
  for (int pass = 1; pass <= max_passes; ++pass) {
    double change = 0.0;
    for (const auto& line : runs) {
      for (const auto& run : line) {
        y.resize(run.size());
        for (std::size_t t = 0; t < run.size(); ++t) y[t] = w[run[t]];
        std::size_t a = 0;
        for (std::size_t t = 1; t < run.size(); ++t) {
          if (t + 1 == run.size() || !lay.free[run[t]]) {
            change = std::max(change, hull_segment(y, a, t, stack));
            a = t;
          }
        }
        for (std::size_t t = 0; t < run.size(); ++t) w[run[t]] = y[t];
      }
    }
    if (change <= tol) return pass;
  }
  throw ConvergenceError("convex envelope did not reach a fixpoint", {});
}

int jacobi(GridFunction& w, const GridFunction& v, const StencilSet& directions, double tol, const Layout& lay,
           int max_passes) {
  const Grid& g = w.grid();
  const auto& pts = lay.free_points;
  std::vector<double> next(pts.size());
  std::vector<double> change(pts.size());
  for (int pass = 1; pass <= max_passes; ++pass) {
    parallel_for(pts.size(), [&](std::size_t k) {
      const Index x = pts[k];
      double best = v[x];
      for (const auto& d : directions.directions()) {
        const Index up = g.shifted(x, d.step);
        const Index down = g.shifted(x, neg(d.step));
        if (up < 0 || down < 0 || !lay.member[up] || !lay.member[down]) continue;
        best = std::min(best, 0.5 * (w[up] + w[down]));
      }
      next[k] = best;
      change[k] = std::abs(w[x] - best);
    });
    double worst = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      w[pts[k]] = next[k];
      worst = std::max(worst, change[k]);
    }
    if (worst <= tol) return pass;
  }
  throw ConvergenceError("convex envelope did not reach a fixpoint", {});
}

}  // namespace

EnvelopeResult convex_envelope(const GridFunction& v, const StencilSet& directions, double tol,
                               const EnvelopeOptions& options) {
  const Grid& g = v.grid();
  const Layout lay = make_layout(g, options.region);
  check_input(v, directions, tol, options, lay);

  EnvelopeResult out;
  out.envelope = v;
  if (options.method == EnvelopeMethod::line_hull) {
    const int max_passes = options.max_iterations > 0 ? options.max_iterations : 100'000;
    out.iterations = line_hull(out.envelope, directions, tol, lay, max_passes);
  } else {
    const int max_passes = options.max_iterations > 0 ? options.max_iterations : 10'000'000;
    out.iterations = jacobi(out.envelope, v, directions, tol, lay, max_passes);
  }
  for (Index i = 0; i < g.size(); ++i) {
    if (lay.member[i]) out.gap = std::max(out.gap, v[i] - out.envelope[i]);
  }
  return out;
}

double envelope_gap(const GridFunction& v, const StencilSet& directions, double tol, const EnvelopeOptions& options) {
  return convex_envelope(v, directions, tol, options).gap;
}

std::vector<Index> free_points(const Grid& grid, const RegionMask* region) {
  return make_layout(grid, region).free_points;
}

double min_directional_second_difference(const GridFunction& w, const StencilSet& directions,
                                         const RegionMask* region) {
  const Grid& g = w.grid();
  const Layout lay = make_layout(g, region);
  double worst = std::numeric_limits<double>::infinity();
  for (Index x : lay.free_points) {
    for (const auto& d : directions.directions()) {
      const Index up = g.shifted(x, d.step);
      const Index down = g.shifted(x, neg(d.step));
      if (up < 0 || down < 0 || !lay.member[up] || !lay.member[down]) continue;
      worst = std::min(worst, w[up] + w[down] - 2.0 * w[x]);
    }
  }
  return worst;
}

}  // namespace dplap
