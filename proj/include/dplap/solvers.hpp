#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dplap/dominative_operator.hpp"
#include "dplap/grid.hpp"

namespace dplap {

enum class Method { pseudo_time, policy_iteration };

std::string to_string(Method m);
Method method_from_string(const std::string& name);

/// 1e-6 in 1D, 1e-4 in 2D and 3D.
double default_tolerance(int dim);

struct SolverOptions {
  double tol = 1e-4;
  Method method = Method::policy_iteration;
  /// Outer iterations (policy updates, time steps, or eigen steps); 0 picks a
  /// method-dependent default.
  int max_iterations = 0;
  /// Cap on relaxation sweeps per frozen-policy linear solve.
  int max_inner_sweeps = 1'000'000;
};

struct SolveReport {
  int iterations = 0;
  /// Max-norm residual after each outer iteration.
  std::vector<double> residual_history;
  double final_residual = 0.0;
  double wall_time = 0.0;  // seconds
  std::string scheme;
  std::string method;
  /// Pseudo-time step and its stability bound (pseudo-time only).
  double time_step = 0.0;
  double time_step_bound = 0.0;
  /// Total relaxation sweeps (policy iteration only).
  long inner_sweeps = 0;
  /// Eigenvalue estimate per inverse-iteration step (eigen solves only).
  std::vector<double> lambda_history;
};

struct TorsionSolution {
  GridFunction u;
  SolveReport report;
};

/// First eigenpair; the eigenfunction is positive with max-norm 1.
struct EigenPair {
  double lambda = 0.0;
  GridFunction eigenfunction;
  double residual = 0.0;  // max |D_p^h u + lambda u| over interior points
};

struct EigenSolution {
  EigenPair pair;
  SolveReport report;
};

/// Solves -D_p^h w = f on the interior with w = 0 on boundary points, starting
/// from `initial` (zero when null). The result satisfies
/// max |D_p^h w + f| <= options.tol on interior points.
TorsionSolution solve_dirichlet(const GridFunction& rhs, const OperatorParams& params, const SolverOptions& options,
                                const GridFunction* initial = nullptr);

/// Discrete torsion problem -D_p^h u = 1, u = 0 on boundary points.
TorsionSolution solve_torsion(const DomainSpec& domain, const OperatorParams& params, double h,
                              const SolverOptions& options);
TorsionSolution solve_torsion(std::shared_ptr<const Grid> grid, const OperatorParams& params,
                              const SolverOptions& options);

/// Inverse power iteration for D_p^h u + lambda u = 0. Starts from the
/// normalized torsion solution unless `initial` is given.
EigenSolution solve_eigen(const DomainSpec& domain, const OperatorParams& params, double h,
                          const SolverOptions& options);
EigenSolution solve_eigen(std::shared_ptr<const Grid> grid, const OperatorParams& params, const SolverOptions& options,
                          const GridFunction* initial = nullptr);

/// max over interior points of |D_p^h u + rhs|.
double residual(const GridFunction& u, const OperatorParams& params, const GridFunction& rhs);
double residual(const GridFunction& u, const OperatorParams& params, double rhs);

}  // namespace dplap
