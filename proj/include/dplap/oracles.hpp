#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dplap/domain.hpp"
#include "dplap/grid.hpp"
#include "dplap/sym_matrix.hpp"

// Closed forms and brute-force checks used as ground truth for the solvers.
// Nothing here calls the PDE solvers or Eigen's decompositions.
namespace dplap::oracle {

/// Exact solution evaluated at a point; zero outside its domain.
using Oracle = std::function<double(const Coord&)>;

struct OracleSpec {
  std::string kind;
  Oracle evaluate;
};

/// (R^2 - |x|^2) / (2(n + p - 2)) on the ball of radius R about the origin.
OracleSpec ball_torsion_exact(int n, double p, double radius);

/// x(L - x) / (2(p - 1)) on [0, L].
OracleSpec interval_torsion_exact(double p, double length);

struct IntervalEigen {
  double lambda;
  OracleSpec eigenfunction;  // sin(pi x / L), max 1
};

/// lambda = (p - 1) pi^2 / L^2 with eigenfunction sin(pi x / L).
IntervalEigen interval_eigen_exact(double p, double length);

/// Double sine series for -Laplace u = 1 on the unit square, summed over the
/// first `terms` odd modes per axis. Symmetric in x <-> y and x <-> 1 - x by
/// construction.
double box_poisson_value(const Coord& x, int terms);
OracleSpec box_poisson_series(int terms);
/// The series on every active point of a grid over the unit square.
GridFunction box_poisson_reference(std::shared_ptr<const Grid> grid, int terms);

/// u(x) = 1/2 <x, A x>.
OracleSpec quadratic(const SymMatrix& a);

// Brute-force small dense linear algebra on row-major n x n arrays, n <= 3.

struct Dense {
  int n = 0;
  std::array<std::array<double, 3>, 3> a{};

  static Dense from(const SymMatrix& m);
};

/// Ascending eigenvalues of a symmetric matrix: quadratic formula for n = 2,
/// trigonometric solution of the characteristic cubic for n = 3, each root
/// polished by Newton steps on the characteristic polynomial.
std::array<double, 3> eigenvalues(const Dense& m);
/// Adjugate over determinant.
Dense inverse(const Dense& m);
double trace(const Dense& m);
double quadratic_form(const Dense& m, const Coord& q);
/// tr X + (p - 2) lambda_max(X).
double dp_value(const Dense& m, double p);

/// LHS - RHS of 1 / D_p((sum nu_i X_i)^-1) >= sum nu_i / D_p(X_i^-1).
/// Throws InvalidArgument unless every X_i is positive definite and the
/// weights are a probability vector.
double dp_harmonic_slack(const std::vector<SymMatrix>& xs, const std::vector<double>& nu, double p);
/// The inequality above within 1e-10.
bool dp_harmonic_inequality_check(const std::vector<SymMatrix>& xs, const std::vector<double>& nu, double p);

/// RHS - LHS of <q, (mu A1 + (1-mu) A2)^-1 q> <= mu <q, A1^-1 q> + (1-mu) <q, A2^-1 q>.
double jet_convexity_slack(const Coord& q, const SymMatrix& a1, const SymMatrix& a2, double mu);
bool jet_convexity_check(const Coord& q, const SymMatrix& a1, const SymMatrix& a2, double mu);

}  // namespace dplap::oracle
