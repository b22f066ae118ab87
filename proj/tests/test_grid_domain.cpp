#include <gtest/gtest.h>

#include <sstream>

#include "dplap/error.hpp"
#include "support.hpp"

using namespace dplap;
using namespace dplap::testing;

TEST(SignedDistance, Examples) {
  EXPECT_DOUBLE_EQ(unit_ball().signed_distance(point({0, 0})), -1.0);
  EXPECT_DOUBLE_EQ(unit_box().signed_distance(point({0.5, 0.5})), -0.5);
  EXPECT_DOUBLE_EQ(unit_ball().signed_distance(point({2, 0})), 1.0);
}

TEST(SignedDistance, SignMatchesMembershipAndIsLipschitz) {
  Gen gen(11);
  const DomainSpec shapes[] = {unit_ball(2), unit_box(2), unit_ball(3), unit_box(3),
                               DomainSpec::ball(point({0.3, -0.2}), 0.7)};
  for (const auto& d : shapes) {
    const int n = d.dim();
    for (int trial = 0; trial < 2000; ++trial) {
      Coord x(n), y(n);
      for (int k = 0; k < n; ++k) {
        x[k] = gen.uniform(-1.5, 1.5);
        y[k] = gen.uniform(-1.5, 1.5);
      }
      EXPECT_LE(std::abs(d.signed_distance(x) - d.signed_distance(y)), (x - y).norm() + 1e-12);
      // Inside iff every coordinate test passes.
      bool inside = true;
      if (d.shape() == Shape::ball) {
        inside = (x - d.center()).norm() < d.radius();
      } else {
        for (int k = 0; k < n; ++k) inside = inside && x[k] > 0.0 && x[k] < 1.0;
      }
      EXPECT_EQ(d.signed_distance(x) < 0.0, inside);
    }
  }
}

TEST(SignedDistance, OtherShapesAreNegativeInsidePositiveOutside) {
  const DomainSpec shapes[] = {
      DomainSpec::ellipse(point({0, 0}), point({1, 0.6})),
      DomainSpec::stadium(point({-0.5, 0}), point({0.5, 0}), 0.5),
      DomainSpec::l_shape(0.0, 1.0),
      DomainSpec::halfspace_intersection({{point({-1, 0}), 0.0}, {point({0, -1}), 0.0}, {point({1, 1}), 1.0}}),
  };
  const Coord inside[] = {point({0.9, 0}), point({0.9, 0.1}), point({0.25, 0.75}), point({0.2, 0.2})};
  const Coord outside[] = {point({0, 0.7}), point({0, 0.6}), point({0.75, 0.75}), point({0.6, 0.6})};
  for (int s = 0; s < 4; ++s) {
    EXPECT_LT(shapes[s].signed_distance(inside[s]), 0.0) << shapes[s].describe();
    EXPECT_GT(shapes[s].signed_distance(outside[s]), 0.0) << shapes[s].describe();
  }
}

TEST(DomainSpec, ConvexityAndInteriorSphereFlags) {
  EXPECT_TRUE(unit_ball().convex());
  EXPECT_TRUE(unit_ball().interior_sphere());
  EXPECT_TRUE(DomainSpec::ellipse(point({0, 0}), point({1, 0.6})).interior_sphere());
  EXPECT_TRUE(DomainSpec::stadium(point({-0.5, 0}), point({0.5, 0}), 0.5).interior_sphere());
  EXPECT_TRUE(unit_box().convex());
  EXPECT_FALSE(unit_box().interior_sphere());
  EXPECT_FALSE(DomainSpec::l_shape(0, 1).convex());
  EXPECT_FALSE(DomainSpec::l_shape(0, 1).interior_sphere());
  EXPECT_FALSE(
      DomainSpec::halfspace_intersection({{point({-1, 0}), 0.0}, {point({0, -1}), 0.0}, {point({1, 1}), 1.0}})
          .interior_sphere());
}

TEST(DomainSpec, RejectsBadParameters) {
  EXPECT_THROW(DomainSpec::ball(Coord::Zero(4), 1.0), InvalidArgument);
  EXPECT_THROW(DomainSpec::ball(Coord::Zero(2), -1.0), InvalidArgument);
  EXPECT_THROW(DomainSpec::box(point({0, 0}), point({1, 0})), InvalidArgument);
  EXPECT_THROW(shape_from_string("torus"), InvalidArgument);
}

TEST(BuildGrid, UnitSquareAtHalfHasOneInteriorPoint) {
  const auto g = build_grid(unit_box(), 0.5);
  ASSERT_EQ(g.interior().size(), 1u);
  EXPECT_TRUE(g.coord(g.interior()[0]).isApprox(point({0.5, 0.5})));
}

TEST(BuildGrid, IntervalQuarterSpacing) {
  const auto g = build_grid(DomainSpec::interval(0, 1), 0.25);
  ASSERT_EQ(g.interior().size(), 3u);
  const double expected[] = {0.25, 0.5, 0.75};
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(g.coord(g.interior()[k])[0], expected[k], 1e-15);
}

TEST(BuildGrid, BallCountMatchesIntegerLatticeCount) {
  // Lattice points of spacing 0.1 strictly inside the unit circle:
  // integer pairs with i^2 + j^2 < 100.
  long exact = 0;
  for (int i = -10; i <= 10; ++i) {
    for (int j = -10; j <= 10; ++j) exact += i * i + j * j < 100;
  }
  const auto g = build_grid(unit_ball(), 0.1);
  EXPECT_EQ(static_cast<long>(g.interior().size()), exact);
  // Area estimate pi/h^2; the strict count of a small disk runs a few percent low.
  EXPECT_NEAR(static_cast<double>(g.interior().size()), M_PI / 0.01, 0.03 * M_PI / 0.01);
}

TEST(BuildGrid, TooCoarse) {
  EXPECT_THROW(build_grid(unit_box(), 1.0), GridTooCoarse);
  try {
    build_grid(unit_ball(), 3.0);
    FAIL();
  } catch (const GridTooCoarse& e) {
    EXPECT_STREQ(e.what(), "grid too coarse");
  }
  EXPECT_THROW(build_grid(unit_ball(), 0.0), InvalidArgument);
}

TEST(BuildGrid, ClassificationInvariants) {
  const DomainSpec shapes[] = {unit_ball(2),
                               unit_box(2),
                               unit_ball(3),
                               DomainSpec::ellipse(point({0, 0}), point({1, 0.6})),
                               DomainSpec::stadium(point({-0.5, 0}), point({0.5, 0}), 0.5),
                               DomainSpec::l_shape(0, 1),
                               DomainSpec::interval(-1, 2)};
  for (const auto& d : shapes) {
    const auto g = build_grid(d, d.dim() == 3 ? 0.125 : 1.0 / 16);
    const int n = g.dim();
    for (Index i = 0; i < g.size(); ++i) {
      const Coord x = g.coord(i);
      if (g.is_interior(i)) {
        EXPECT_LT(d.signed_distance(x), 0.0);
        for (int k = 0; k < n; ++k) {
          for (int s : {-1, 1}) {
            MultiIndex step{0, 0, 0};
            step[k] = s;
            const Index j = g.shifted(i, step);
            ASSERT_GE(j, 0);
            EXPECT_TRUE(g.is_active(j));
          }
        }
      } else if (g.cls(i) == PointClass::boundary) {
        EXPECT_LE(d.signed_distance(x), g.h() * std::sqrt(double(n)) + 1e-12);
      }
    }
  }
}

TEST(BuildGrid, ConvexMidpointsStayInside) {
  Gen gen(5);
  const DomainSpec shapes[] = {unit_ball(2), unit_box(2), DomainSpec::ellipse(point({0, 0}), point({1, 0.6})),
                               DomainSpec::stadium(point({-0.5, 0}), point({0.5, 0}), 0.5), unit_ball(3)};
  for (const auto& d : shapes) {
    const auto g = build_grid(d, d.dim() == 3 ? 0.1 : 0.05);
    const auto& in = g.interior();
    for (int t = 0; t < 5000; ++t) {
      const Coord a = g.coord(in[gen.integer(0, int(in.size()) - 1)]);
      const Coord b = g.coord(in[gen.integer(0, int(in.size()) - 1)]);
      EXPECT_TRUE(d.contains(0.5 * (a + b)));
    }
  }
}

TEST(BuildGrid, RefinementQuadruplesInteriorCount) {
  for (const auto& d : {unit_ball(), unit_box(), DomainSpec::ellipse(point({0, 0}), point({1, 0.6}))}) {
    for (double h : {0.1, 0.05, 0.025}) {
      const double coarse = double(build_grid(d, h).interior().size());
      const double fine = double(build_grid(d, h / 2).interior().size());
      // Boundary-layer slack of order 1/h.
      EXPECT_GE(fine, 4.0 * coarse - 8.0 / h) << d.describe() << " h=" << h;
      EXPECT_LE(fine, 4.0 * coarse + 8.0 / h) << d.describe() << " h=" << h;
    }
  }
}

TEST(GridFunction, StoresNothingAtExteriorAndExportsCsv) {
  const auto g = grid_for(unit_ball(), 0.5);
  GridFunction u = GridFunction::sample(g, [](const Coord& x) { return x.squaredNorm(); });
  u.set_boundary(0.0);
  for (Index i = 0; i < g->size(); ++i) {
    if (g->is_active(i)) {
      EXPECT_TRUE(std::isfinite(u[i]));
    } else {
      EXPECT_TRUE(std::isnan(u[i]));
    }
  }
  std::ostringstream os;
  write_csv(os, u);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "x,y,class,value");
  long rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, long(g->interior().size() + g->boundary().size()));
}

TEST(GridFunction, MaxAndScaling) {
  const auto g = grid_for(unit_box(1), 0.25);
  GridFunction u = GridFunction::sample(g, [](const Coord& x) { return -x[0]; });
  EXPECT_DOUBLE_EQ(u.max_abs_interior(), 0.75);
  EXPECT_DOUBLE_EQ(u.max_interior(), -0.25);
  u *= -2.0;
  EXPECT_DOUBLE_EQ(u.max_interior(), 1.5);
}
