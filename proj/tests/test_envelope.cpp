#include <gtest/gtest.h>

#include "dplap/convex_envelope.hpp"
#include "dplap/error.hpp"
#include "dplap/solvers.hpp"
#include "hull_oracle.hpp"
#include "support.hpp"

using namespace dplap;
using namespace dplap::testing;

namespace {

GridFunction random_function(const std::shared_ptr<const Grid>& g, Gen& gen, double amplitude = 1.0) {
  GridFunction v(g);
  for (Index i = 0; i < g->size(); ++i) {
    if (g->is_active(i)) v[i] = gen.uniform(-amplitude, amplitude);
  }
  return v;
}

std::vector<double> nodes(const GridFunction& v) {
  std::vector<double> out;
  for (Index i = 0; i < v.grid().size(); ++i) {
    if (v.grid().is_active(i)) out.push_back(v[i]);
  }
  return out;
}

std::vector<double> abscissae(const Grid& g) {
  std::vector<double> out;
  for (Index i = 0; i < g.size(); ++i) {
    if (g.is_active(i)) out.push_back(g.coord(i)[0]);
  }
  return out;
}

}  // namespace

TEST(ConvexEnvelope, ConvexQuadraticIsFixpoint) {
  const auto g = grid_for(unit_box(2), 1.0 / 16);
  const auto v = GridFunction::sample(g, [](const Coord& x) { return 0.5 * x.squaredNorm(); });
  const auto r = convex_envelope(v, StencilSet::default_for(2), 1e-13);
  EXPECT_EQ(r.gap, 0.0);
  for (Index i = 0; i < g->size(); ++i) {
    if (g->is_active(i)) EXPECT_EQ(r.envelope[i], v[i]);
  }
}

TEST(ConvexEnvelope, AffineHasZeroGap) {
  const auto g = grid_for(unit_ball(2), 1.0 / 16);
  const auto v = GridFunction::sample(g, [](const Coord& x) { return 3.0 * x[0] - 2.0 * x[1] + 0.5; });
  EXPECT_LE(envelope_gap(v, StencilSet::default_for(2), 1e-13), 1e-12);
}

TEST(ConvexEnvelope, DoubleWellInOneDimension) {
  const double h = 1.0 / 64;
  const auto g = grid_for(DomainSpec::interval(-1, 1), h);
  const auto v = GridFunction::sample(g, [](const Coord& x) {
    return std::min((x[0] + 0.5) * (x[0] + 0.5), (x[0] - 0.5) * (x[0] - 0.5));
  });
  const auto r = convex_envelope(v, StencilSet::default_for(1), 1e-14);
  EXPECT_NEAR(r.gap, 0.25, 2 * h);
  for (Index i = 0; i < g->size(); ++i) {
    if (!g->is_active(i)) continue;
    const double x = g->coord(i)[0];
    if (std::abs(x) <= 0.5) EXPECT_NEAR(r.envelope[i], 0.0, 1e-12) << x;
    if (std::abs(x) >= 0.5) EXPECT_NEAR(r.envelope[i], v[i], 1e-12) << x;
  }
  const auto hull = brute_force_lower_hull(abscissae(*g), nodes(v));
  const auto got = nodes(r.envelope);
  for (std::size_t k = 0; k < got.size(); ++k) EXPECT_NEAR(got[k], hull[k], 1e-10);
}

TEST(ConvexEnvelope, MatchesBruteForceHullInOneDimension) {
  Gen gen(101);
  for (int t = 0; t < 40; ++t) {
    const auto g = grid_for(DomainSpec::interval(0, gen.uniform(0.5, 3.0)), 1.0 / gen.integer(8, 60));
    const auto v = random_function(g, gen);
    for (auto method : {EnvelopeMethod::line_hull, EnvelopeMethod::jacobi}) {
      EnvelopeOptions o;
      o.method = method;
      const auto r = convex_envelope(v, StencilSet::default_for(1), 1e-14, o);
      const auto hull = brute_force_lower_hull(abscissae(*g), nodes(v));
      const auto got = nodes(r.envelope);
      for (std::size_t k = 0; k < got.size(); ++k) EXPECT_NEAR(got[k], hull[k], 1e-10);
    }
  }
}

TEST(ConvexEnvelope, BelowInputConvexAlongStencilBoundaryHeld) {
  Gen gen(102);
  const auto s = StencilSet::default_for(2);
  for (const auto& d : {unit_ball(2), unit_box(2)}) {
    const auto g = grid_for(d, 1.0 / 12);
    for (int t = 0; t < 10; ++t) {
      const auto v = random_function(g, gen);
      const double tol = 1e-12;
      const auto r = convex_envelope(v, s, tol);
      for (Index i = 0; i < g->size(); ++i) {
        if (g->is_active(i)) EXPECT_LE(r.envelope[i], v[i]);
      }
      for (Index i : g->boundary()) EXPECT_EQ(r.envelope[i], v[i]);
      EXPECT_GE(min_directional_second_difference(r.envelope, s), -10 * tol);
      EXPECT_GE(r.gap, 0.0);
    }
  }
}

TEST(ConvexEnvelope, Idempotent) {
  Gen gen(103);
  const auto s = StencilSet::default_for(2);
  const auto g = grid_for(unit_ball(2), 1.0 / 12);
  for (int t = 0; t < 10; ++t) {
    const auto once = convex_envelope(random_function(g, gen), s, 1e-14).envelope;
    const auto twice = convex_envelope(once, s, 1e-14).envelope;
    for (Index i = 0; i < g->size(); ++i) {
      if (g->is_active(i)) EXPECT_NEAR(twice[i], once[i], 1e-12);
    }
  }
}

TEST(ConvexEnvelope, Monotone) {
  Gen gen(104);
  const auto s = StencilSet::default_for(2);
  const auto g = grid_for(unit_box(2), 1.0 / 12);
  for (int t = 0; t < 10; ++t) {
    const auto lo = random_function(g, gen);
    GridFunction hi = lo;
    for (Index i = 0; i < g->size(); ++i) {
      if (g->is_active(i)) hi[i] += gen.uniform(0.0, 0.5);
    }
    const auto a = convex_envelope(lo, s, 1e-14).envelope;
    const auto b = convex_envelope(hi, s, 1e-14).envelope;
    for (Index i = 0; i < g->size(); ++i) {
      if (g->is_active(i)) EXPECT_LE(a[i], b[i] + 1e-12);
    }
  }
}

TEST(ConvexEnvelope, AffineEquivariant) {
  Gen gen(105);
  const auto s = StencilSet::default_for(2);
  const auto g = grid_for(unit_ball(2), 1.0 / 12);
  for (int t = 0; t < 10; ++t) {
    const auto v = random_function(g, gen);
    const double a0 = gen.uniform(-1, 1), a1 = gen.uniform(-2, 2), a2 = gen.uniform(-2, 2);
    auto affine = [&](const Coord& x) { return a0 + a1 * x[0] + a2 * x[1]; };
    GridFunction shifted = v;
    for (Index i = 0; i < g->size(); ++i) {
      if (g->is_active(i)) shifted[i] += affine(g->coord(i));
    }
    const auto a = convex_envelope(v, s, 1e-14).envelope;
    const auto b = convex_envelope(shifted, s, 1e-14).envelope;
    for (Index i = 0; i < g->size(); ++i) {
      if (g->is_active(i)) EXPECT_NEAR(b[i], a[i] + affine(g->coord(i)), 1e-10);
    }
  }
}

TEST(ConvexEnvelope, JacobiAndLineHullReachTheSameFixpoint) {
  Gen gen(106);
  const auto s = StencilSet::default_for(2);
  const auto g = grid_for(unit_ball(2), 1.0 / 6);
  for (int t = 0; t < 5; ++t) {
    const auto v = random_function(g, gen);
    EnvelopeOptions jacobi;
    jacobi.method = EnvelopeMethod::jacobi;
    const auto a = convex_envelope(v, s, 1e-15).envelope;
    const auto b = convex_envelope(v, s, 1e-15, jacobi).envelope;
    for (Index i = 0; i < g->size(); ++i) {
      if (g->is_active(i)) EXPECT_NEAR(a[i], b[i], 1e-9);
    }
  }
}

TEST(ConvexEnvelope, RegionRestrictsFreePoints) {
  const auto g = grid_for(unit_box(2), 1.0 / 8);
  RegionMask region(std::size_t(g->size()), false);
  for (Index i = 0; i < g->size(); ++i) {
    region[std::size_t(i)] = g->is_active(i) && g->coord(i)[0] <= 0.5 + 1e-12;
  }
  const auto v = GridFunction::sample(g, [](const Coord& x) { return -x.squaredNorm(); });
  EnvelopeOptions o;
  o.region = &region;
  const auto r = convex_envelope(v, StencilSet::default_for(2), 1e-14, o);
  for (Index i : free_points(*g, &region)) EXPECT_LE(g->coord(i)[0], 0.5 - 0.1);
  for (Index i = 0; i < g->size(); ++i) {
    if (g->is_active(i) && !region[std::size_t(i)]) EXPECT_EQ(r.envelope[i], v[i]);
  }
  EXPECT_GT(r.gap, 0.0);
}

TEST(ConvexEnvelope, NonconvexDomainNeedsOverride) {
  const auto g = grid_for(DomainSpec::l_shape(0, 1), 1.0 / 8);
  const GridFunction v(g);
  EXPECT_THROW(convex_envelope(v, StencilSet::default_for(2), 1e-12), InvalidArgument);
  EnvelopeOptions o;
  o.allow_nonconvex = true;
  EXPECT_EQ(convex_envelope(v, StencilSet::default_for(2), 1e-12, o).gap, 0.0);
}

TEST(ConvexEnvelope, NonConvergenceIsAnError) {
  Gen gen(107);
  const auto g = grid_for(unit_ball(2), 1.0 / 16);
  EnvelopeOptions o;
  o.method = EnvelopeMethod::jacobi;
  o.max_iterations = 2;
  EXPECT_THROW(convex_envelope(random_function(g, gen), StencilSet::default_for(2), 1e-14, o), ConvergenceError);
}

TEST(EnvelopeGap, TorsionSqrtShrinksWrongSignDoesNot) {
  const OperatorParams params(3.0, 2);
  SolverOptions so;
  so.tol = 1e-8;
  double prev = 1e300;
  for (double h : {1.0 / 32, 1.0 / 64}) {
    const auto u = solve_torsion(unit_ball(), params, h, so).u;
    GridFunction v = u;
    GridFunction w = u;
    for (Index i = 0; i < u.grid().size(); ++i) {
      if (!u.grid().is_active(i)) continue;
      v[i] = -std::sqrt(u[i]);
      w[i] = std::sqrt(u[i]);
    }
    const double gap = envelope_gap(v, params.directions(), 1e-12);
    EXPECT_LT(gap, prev);
    EXPECT_LE(gap, 1.0 * h);
    prev = gap;
    // +sqrt(u) is concave: its envelope is flat at the boundary value.
    EXPECT_GE(envelope_gap(w, params.directions(), 1e-12), 0.9 * std::sqrt(u.max_interior()));
  }
}
