#include <gtest/gtest.h>

#include <numbers>

#include "dplap/error.hpp"
#include "dplap/oracles.hpp"
#include "dplap/solvers.hpp"
#include "support.hpp"

using namespace dplap;
using namespace dplap::testing;

namespace {

constexpr double kPi = std::numbers::pi;

SolverOptions with_tol(double tol, Method m = Method::policy_iteration) {
  SolverOptions o;
  o.tol = tol;
  o.method = m;
  return o;
}

double value_at(const GridFunction& u, const Coord& x) {
  const Index i = u.grid().locate(x);
  EXPECT_GE(i, 0);
  EXPECT_TRUE(u.grid().coord(i).isApprox(x, 1e-12));
  return u[i];
}

void expect_valid_report(const SolveReport& r, double tol) {
  ASSERT_FALSE(r.residual_history.empty());
  EXPECT_EQ(r.final_residual, r.residual_history.back());
  EXPECT_LE(r.final_residual, tol);
  EXPECT_EQ(r.iterations, int(r.residual_history.size()));
}

}  // namespace

TEST(SolveTorsion, IntervalMidpoint) {
  const auto s = solve_torsion(DomainSpec::interval(0, 1), OperatorParams(3.0, 1), 1.0 / 128, with_tol(1e-8));
  EXPECT_NEAR(value_at(s.u, point({0.5})), 0.0625, 2e-3);
  expect_valid_report(s.report, 1e-8);
}

TEST(SolveTorsion, BallCenterValues) {
  for (double p : {2.0, 6.0}) {
    const auto s = solve_torsion(unit_ball(), OperatorParams(p, 2), 1.0 / 64, with_tol(1e-4));
    EXPECT_NEAR(value_at(s.u, point({0, 0})), 1.0 / (2.0 * p), 5e-3) << "p=" << p;
    expect_valid_report(s.report, 1e-4);
  }
}

TEST(SolveTorsion, PositiveInsideZeroOnBoundary) {
  const DomainSpec shapes[] = {unit_ball(), unit_box(), DomainSpec::ellipse(point({0, 0}), point({1, 0.6})),
                               DomainSpec::stadium(point({-0.5, 0}), point({0.5, 0}), 0.5), unit_ball(3)};
  for (const auto& d : shapes) {
    const auto s = solve_torsion(d, OperatorParams(4.0, d.dim()), d.dim() == 3 ? 0.125 : 1.0 / 16, with_tol(1e-6));
    for (Index i : s.u.grid().interior()) EXPECT_GT(s.u[i], 0.0) << d.describe();
    for (Index i : s.u.grid().boundary()) EXPECT_EQ(s.u[i], 0.0);
    EXPECT_LE(residual(s.u, OperatorParams(4.0, d.dim()), 1.0), 1e-6);
  }
}

TEST(SolveTorsion, ResidualHistoryEventuallyNonincreasing) {
  for (double p : {2.0, 3.0, 10.0}) {
    const auto s = solve_torsion(unit_box(), OperatorParams(p, 2), 1.0 / 32, with_tol(1e-6));
    const auto& r = s.report.residual_history;
    for (std::size_t k = 11; k < r.size(); ++k) EXPECT_LE(r[k], r[k - 1]) << "p=" << p << " k=" << k;
  }
  const auto s = solve_torsion(unit_ball(), OperatorParams(3.0, 2), 1.0 / 8, with_tol(1e-5, Method::pseudo_time));
  const auto& r = s.report.residual_history;
  for (std::size_t k = 11; k < r.size(); ++k) EXPECT_LE(r[k], r[k - 1]);
}

TEST(SolveTorsion, PseudoTimeAgreesWithPolicyIteration) {
  for (double p : {2.0, 5.0}) {
    const OperatorParams params(p, 2);
    const auto a = solve_torsion(unit_ball(), params, 1.0 / 8, with_tol(1e-8, Method::pseudo_time));
    const auto b = solve_torsion(unit_ball(), params, 1.0 / 8, with_tol(1e-8));
    EXPECT_GT(a.report.time_step, 0.0);
    EXPECT_LE(a.report.time_step, a.report.time_step_bound);
    for (Index i : a.u.grid().interior()) EXPECT_NEAR(a.u[i], b.u[i], 1e-8);
  }
}

TEST(SolveTorsion, ComparisonWithQuadraticBarriers) {
  // (r^2 - |x|^2) / (2(n + p - 2)) solves the scheme exactly at interior
  // points; with r just inside the boundary it lies below u on boundary
  // points, with r past the outermost boundary point it lies above.
  const double h = 1.0 / 32;
  for (double p : {2.0, 3.0, 8.0}) {
    const auto s = solve_torsion(unit_ball(), OperatorParams(p, 2), h, with_tol(1e-9));
    const double denom = 2.0 * (2.0 + p - 2.0);
    const double r_in = 1.0 - 1e-9;
    const double r_out = 1.0 + h * std::sqrt(2.0);
    const double slack = 1e-9;  // residual times the torsion bound
    for (Index i : s.u.grid().interior()) {
      const double r2 = s.u.grid().coord(i).squaredNorm();
      EXPECT_GE(s.u[i], (r_in * r_in - r2) / denom - slack);
      EXPECT_LE(s.u[i], (r_out * r_out - r2) / denom + slack);
    }
  }
}

TEST(SolveTorsion, MaxDecreasesWithP) {
  double prev = 1e300;
  for (double p : {2.0, 3.0, 5.0, 10.0, 20.0}) {
    const auto s = solve_torsion(unit_box(), OperatorParams(p, 2), 1.0 / 32, with_tol(1e-6));
    EXPECT_LE(s.u.max_interior(), prev);
    prev = s.u.max_interior();
  }
}

TEST(SolveTorsion, RejectsBadInput) {
  EXPECT_THROW(solve_torsion(unit_ball(), OperatorParams(3.0, 2), 1.0 / 8, with_tol(0.0)), InvalidArgument);
  EXPECT_THROW(solve_torsion(unit_ball(), OperatorParams(3.0, 2), 5.0, with_tol(1e-4)), GridTooCoarse);
  EXPECT_THROW(solve_torsion(unit_ball(), OperatorParams(3.0, 2, Scheme::explicit_2d), 1.0 / 8, with_tol(1e-4)),
               InvalidArgument);
}

TEST(SolveTorsion, NonConvergenceCarriesHistory) {
  SolverOptions o = with_tol(1e-10, Method::pseudo_time);
  o.max_iterations = 5;
  try {
    solve_torsion(unit_ball(), OperatorParams(3.0, 2), 1.0 / 16, o);
    FAIL();
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.history().size(), 5u);
  }
}

TEST(Residual, Examples) {
  const auto g = grid_for(DomainSpec::interval(0, 1), 1.0 / 64);
  const auto exact = GridFunction::sample(g, oracle::interval_torsion_exact(3.0, 1.0).evaluate);
  EXPECT_LE(residual(exact, OperatorParams(3.0, 1), 1.0), 1e-12);
  EXPECT_DOUBLE_EQ(residual(GridFunction(g), OperatorParams(3.0, 1), 1.0), 1.0);
  GridFunction ones(g);
  for (Index i : g->interior()) ones[i] = 1.0;
  EXPECT_DOUBLE_EQ(residual(GridFunction(g), OperatorParams(3.0, 1), ones), 1.0);
}

TEST(Residual, BallQuadraticIsConsistent) {
  // Unclipped paraboloid: every stencil line sees the same quadratic.
  for (double h : {1.0 / 32, 1.0 / 64}) {
    const auto g = grid_for(unit_ball(), h);
    const auto u = GridFunction::sample(g, [](const Coord& x) { return (1.0 - x.squaredNorm()) / 6.0; });
    EXPECT_LE(residual(u, OperatorParams(3.0, 2), 1.0), 1e-9);
  }
}

TEST(SolveEigen, IntervalAndSquare) {
  const auto o2 = solve_eigen(DomainSpec::interval(0, 1), OperatorParams(2.0, 1), 1.0 / 128, with_tol(1e-8));
  EXPECT_NEAR(o2.pair.lambda, kPi * kPi, 0.01 * kPi * kPi);
  const auto o4 = solve_eigen(DomainSpec::interval(0, 1), OperatorParams(4.0, 1), 1.0 / 128, with_tol(1e-8));
  EXPECT_NEAR(o4.pair.lambda, 3 * kPi * kPi, 0.03 * kPi * kPi);
  const auto sine = oracle::interval_eigen_exact(4.0, 1.0).eigenfunction.evaluate;
  for (Index i : o4.pair.eigenfunction.grid().interior()) {
    EXPECT_NEAR(o4.pair.eigenfunction[i], sine(o4.pair.eigenfunction.grid().coord(i)), 0.01);
  }
  const auto sq = solve_eigen(unit_box(), OperatorParams(2.0, 2), 1.0 / 32, with_tol(1e-4));
  EXPECT_NEAR(sq.pair.lambda, 2 * kPi * kPi, 0.04 * kPi * kPi);
}

TEST(SolveEigen, PositiveNormalizedSmallResidual) {
  for (double p : {2.0, 5.0}) {
    const auto s = solve_eigen(unit_ball(), OperatorParams(p, 2), 1.0 / 16, with_tol(1e-6));
    const auto& u = s.pair.eigenfunction;
    for (Index i : u.grid().interior()) EXPECT_GT(u[i], 0.0);
    EXPECT_NEAR(u.max_interior(), 1.0, 1e-12);
    EXPECT_GT(s.pair.lambda, 0.0);
    EXPECT_LE(s.pair.residual, 1e-6 * s.pair.lambda);
    EXPECT_NEAR(s.pair.residual, residual(u, OperatorParams(p, 2), [&] {
                  GridFunction lu = u;
                  lu *= s.pair.lambda;
                  return lu;
                }()),
                1e-12);
  }
}

TEST(SolveEigen, InvariantUnderScalingTheStart) {
  const auto g = grid_for(unit_ball(), 1.0 / 16);
  const OperatorParams params(3.0, 2);
  const auto base = solve_eigen(g, params, with_tol(1e-8));
  GridFunction start = GridFunction::sample(g, [](const Coord& x) { return 1.0 - x.squaredNorm(); });
  start.set_boundary(0.0);
  for (double c : {1e-3, 1.0, 250.0}) {
    GridFunction scaled = start;
    scaled *= c;
    const auto s = solve_eigen(g, params, with_tol(1e-8), &scaled);
    EXPECT_NEAR(s.pair.lambda, base.pair.lambda, 1e-6 * base.pair.lambda) << "c=" << c;
  }
}
