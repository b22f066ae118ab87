#include "dplap/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "dplap/error.hpp"
#include "dplap/parallel.hpp"

namespace dplap {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void require_wide_stencil(const OperatorParams& params) {
  if (params.scheme() != Scheme::wide_stencil) {
    throw InvalidArgument("solvers require the monotone wide-stencil scheme");
  }
}

void require_tol(double tol) {
  if (!(tol > 0.0) || !std::isfinite(tol)) throw InvalidArgument("tolerance must be positive");
}

double nonlinear_residual(const DominativeOperator& op, std::span<const double> u, std::span<const double> f) {
  const auto& interior = op.grid().interior();
  double r = 0.0;
  for (std::size_t k = 0; k < interior.size(); ++k) {
    r = std::max(r, std::abs(op.apply(u, k) + f[interior[k]]));
  }
  return r;
}

// Howard's algorithm: freeze the maximizing direction at every point, solve
// the resulting linear M-matrix system by SOR sweeps, then re-maximize.
class PolicySolver {
 public:
  PolicySolver(const DominativeOperator& op, const SolverOptions& options) : op_(op), options_(options) {
    const auto& ext = op.grid().extent();
    int n = 0;
    for (int k = 0; k < op.grid().dim(); ++k) n = std::max(n, ext[k]);
    omega_ = 2.0 / (1.0 + std::sin(std::numbers::pi / std::max(n, 3)));
    window_ = std::max(64, 2 * n);
  }

  void solve(std::span<double> u, std::span<const double> f, SolveReport& report) {
    const auto& interior = op_.grid().interior();
    policy_.assign(interior.size(), 0);
    for (std::size_t k = 0; k < interior.size(); ++k) op_.lambda_max(u, k, &policy_[k]);

    const double p = op_.p();
    // Keeping a direction within tie_eps of the max changes the residual by at
    // most 1% of tol; avoids flip-flopping between tied directions.
    const double tie_eps = p > 2.0 ? 0.01 * options_.tol / (p - 2.0) : 0.0;
    const int max_outer = options_.max_iterations > 0 ? options_.max_iterations : 500;

    // Inexact Howard: while the policy is still moving, linear solves only need
    // to beat the current nonlinear residual; the final solve goes to tol/10.
    double target = std::max(options_.tol, 0.1 * nonlinear_residual(op_, u, f));
    for (int outer = 1; outer <= max_outer; ++outer) {
      report.inner_sweeps += linear_solve(u, f, 0.1 * target, report);
      int changes = 0;
      if (p > 2.0) {
        for (std::size_t k = 0; k < interior.size(); ++k) {
          int best = -1;
          const double top = op_.lambda_max(u, k, &best);
          const double current = op_.second_difference(u, k, policy_[k]);
          if (current < top - tie_eps) {
            policy_[k] = best;
            ++changes;
          }
        }
      }
      const double r = nonlinear_residual(op_, u, f);
      target = changes > 0 ? std::max(options_.tol, 0.1 * r) : options_.tol;
      report.residual_history.push_back(r);
      report.iterations = outer;
      if (changes == 0 && r <= options_.tol) return;
    }
    throw ConvergenceError("policy iteration did not converge", report.residual_history);
  }

 private:
  // In-place sweep; returns the max pre-update residual seen.
  double sweep(std::span<double> u, std::span<const double> f, double omega) const {
    const auto& interior = op_.grid().interior();
    const auto& tab = op_.table();
    const int dim = op_.grid().dim();
    const double pm2 = op_.p() - 2.0;
    double worst = 0.0;
    for (std::size_t k = 0; k < interior.size(); ++k) {
      const Index c = interior[k];
      double num = f[c];
      double diag = 0.0;
      for (int a = 0; a < dim; ++a) {
        const double w = tab.weight(a);
        num += w * (u[tab.plus(k, a)] + u[tab.minus(k, a)]);
        diag += 2.0 * w;
      }
      if (pm2 > 0.0) {
        const int j = policy_[k];
        const double w = pm2 * tab.weight(j);
        num += w * (u[tab.plus(k, j)] + u[tab.minus(k, j)]);
        diag += 2.0 * w;
      }
      const double r = num - diag * u[c];
      worst = std::max(worst, std::abs(r));
      u[c] += omega * r / diag;
    }
    return worst;
  }

  double frozen_residual(std::span<const double> u, std::span<const double> f) const {
    const auto& interior = op_.grid().interior();
    const int dim = op_.grid().dim();
    const double pm2 = op_.p() - 2.0;
    double worst = 0.0;
    for (std::size_t k = 0; k < interior.size(); ++k) {
      double v = f[interior[k]];
      for (int a = 0; a < dim; ++a) v += op_.second_difference(u, k, a);
      if (pm2 > 0.0) v += pm2 * op_.second_difference(u, k, policy_[k]);
      worst = std::max(worst, std::abs(v));
    }
    return worst;
  }

  long linear_solve(std::span<double> u, std::span<const double> f, double tol, const SolveReport& report) {
    const std::vector<double> saved(u.begin(), u.end());
    long sweeps = 0;
    double first = -1.0;
    double checkpoint = std::numeric_limits<double>::infinity();
    while (true) {
      if (sweeps >= options_.max_inner_sweeps) {
        throw ConvergenceError("relaxation sweeps did not converge", report.residual_history);
      }
      const double r = sweep(u, f, omega_);
      ++sweeps;
      if (first < 0.0) first = r;
      if (r <= 0.5 * tol && frozen_residual(u, f) <= tol) return sweeps;
      if (!std::isfinite(r)) throw ConvergenceError("relaxation diverged", report.residual_history);
      bool stalled = r > 1e8 * (first + tol);
      if (sweeps % window_ == 0) {
        stalled = stalled || r > checkpoint;
        checkpoint = r;
      }
      if (stalled && omega_ > 1.0) {
        // The frozen operator is not symmetric, so the over-relaxation factor
        // tuned for the Laplacian can diverge; step it down toward 1 and restart.
        omega_ = std::max(1.0, 2.0 - 2.0 * (2.0 - omega_));
        if (r > first + tol) std::copy(saved.begin(), saved.end(), u.begin());
        first = -1.0;
        checkpoint = std::numeric_limits<double>::infinity();
      }
    }
  }

  const DominativeOperator& op_;
  const SolverOptions& options_;
  std::vector<int> policy_;
  double omega_ = 1.0;
  long window_ = 64;
};

// Explicit monotone time stepping u <- u + dt (D_p^h u + f), Jacobi style.
void pseudo_time_solve(const DominativeOperator& op, std::span<double> u, std::span<const double> f,
                       const SolverOptions& options, SolveReport& report) {
  const Grid& g = op.grid();
  const double h = g.h();
  // Center coefficient: 2n/h^2 from the axes plus 2(p-2)/(h^2 min|e|^2).
  double min_norm2 = std::numeric_limits<double>::infinity();
  for (const auto& d : op.table().directions().directions()) min_norm2 = std::min(min_norm2, d.norm * d.norm);
  const double center = 2.0 * g.dim() / (h * h) + 2.0 * (op.p() - 2.0) / (h * h * min_norm2);
  report.time_step_bound = 1.0 / center;
  report.time_step = 0.9 * report.time_step_bound;
  const double dt = report.time_step;

  const auto& interior = g.interior();
  std::vector<double> update(interior.size());
  const int max_steps = options.max_iterations > 0 ? options.max_iterations : 5'000'000;
  for (int step = 1; step <= max_steps; ++step) {
    parallel_for(interior.size(), [&](std::size_t k) { update[k] = op.apply(u, k) + f[interior[k]]; });
    double r = 0.0;
    for (double v : update) r = std::max(r, std::abs(v));
    report.residual_history.push_back(r);
    report.iterations = step - 1;
    if (r <= options.tol) return;
    for (std::size_t k = 0; k < interior.size(); ++k) u[interior[k]] += dt * update[k];
  }
  throw ConvergenceError("pseudo-time stepping did not converge", report.residual_history);
}

}  // namespace

std::string to_string(Method m) { return m == Method::pseudo_time ? "pseudo-time" : "policy-iteration"; }

Method method_from_string(const std::string& name) {
  if (name == "pseudo-time") return Method::pseudo_time;
  if (name == "policy-iteration") return Method::policy_iteration;
  throw InvalidArgument("unknown method '" + name + "'");
}

double default_tolerance(int dim) { return dim == 1 ? 1e-6 : 1e-4; }

TorsionSolution solve_dirichlet(const GridFunction& rhs, const OperatorParams& params, const SolverOptions& options,
                                const GridFunction* initial) {
  require_wide_stencil(params);
  require_tol(options.tol);
  const auto t0 = Clock::now();
  const auto& grid = rhs.grid_ptr();
  DominativeOperator op(grid, params);

  GridFunction u(grid);
  if (initial) {
    if (&initial->grid() != grid.get()) throw InvalidArgument("initial guess lives on a different grid");
    for (Index i : grid->interior()) u[i] = (*initial)[i];
  }
  u.set_boundary(0.0);

  SolveReport report;
  report.scheme = to_string(params.scheme());
  report.method = to_string(options.method);
  if (options.method == Method::policy_iteration) {
    PolicySolver solver(op, options);
    solver.solve(u.values(), rhs.values(), report);
  } else {
    pseudo_time_solve(op, u.values(), rhs.values(), options, report);
  }
  report.final_residual = report.residual_history.back();
  report.wall_time = seconds_since(t0);
  return {std::move(u), std::move(report)};
}

TorsionSolution solve_torsion(std::shared_ptr<const Grid> grid, const OperatorParams& params,
                              const SolverOptions& options) {
  GridFunction one(grid);
  for (Index i : grid->interior()) one[i] = 1.0;
  return solve_dirichlet(one, params, options);
}

TorsionSolution solve_torsion(const DomainSpec& domain, const OperatorParams& params, double h,
                              const SolverOptions& options) {
  require_wide_stencil(params);
  require_tol(options.tol);
  return solve_torsion(std::make_shared<const Grid>(build_grid(domain, h)), params, options);
}

EigenSolution solve_eigen(std::shared_ptr<const Grid> grid, const OperatorParams& params, const SolverOptions& options,
                          const GridFunction* initial) {
  require_wide_stencil(params);
  require_tol(options.tol);
  const auto t0 = Clock::now();

  GridFunction u(grid);
  SolverOptions inner = options;
  inner.tol = 0.1 * options.tol;
  inner.max_iterations = 0;
  inner.method = Method::policy_iteration;
  if (initial) {
    if (&initial->grid() != grid.get()) throw InvalidArgument("initial guess lives on a different grid");
    for (Index i : grid->interior()) u[i] = (*initial)[i];
  } else {
    SolverOptions start = options;
    start.max_iterations = 0;
    start.method = Method::policy_iteration;
    u = solve_torsion(grid, params, start).u;
  }
  const double top = u.max_interior();
  if (!(top > 0.0)) throw InvalidArgument("initial guess must be positive somewhere");
  u *= 1.0 / top;
  u.set_boundary(0.0);

  DominativeOperator op(grid, params);
  SolveReport report;
  report.scheme = to_string(params.scheme());
  report.method = "inverse-power-iteration";

  const int max_steps = options.max_iterations > 0 ? options.max_iterations : 500;
  // One relaxation solver for all steps, so the over-relaxation factor it
  // settles on carries over between the warm-started solves.
  PolicySolver solver(op, inner);
  GridFunction w = u;
  double lambda_prev = std::numeric_limits<double>::quiet_NaN();
  for (int step = 1; step <= max_steps; ++step) {
    SolveReport step_report;
    solver.solve(w.values(), u.values(), step_report);
    report.inner_sweeps += step_report.inner_sweeps;
    const double wmax = w.max_interior();
    if (!(wmax > 0.0)) throw ConvergenceError("inverse iteration lost positivity", report.lambda_history);
    const double lambda = 1.0 / wmax;
    GridFunction next = w;
    next *= lambda;

    GridFunction scaled = next;
    scaled *= lambda;
    const double eig_res = residual(next, params, scaled);
    report.residual_history.push_back(eig_res);
    report.lambda_history.push_back(lambda);
    report.iterations = step;
    u = std::move(next);
    if (std::isfinite(lambda_prev) && std::abs(lambda - lambda_prev) <= options.tol * lambda &&
        eig_res <= options.tol * lambda) {
      report.final_residual = eig_res;
      report.wall_time = seconds_since(t0);
      return {EigenPair{lambda, std::move(u), eig_res}, std::move(report)};
    }
    lambda_prev = lambda;
  }
  throw ConvergenceError("inverse power iteration did not converge", report.lambda_history);
}

EigenSolution solve_eigen(const DomainSpec& domain, const OperatorParams& params, double h,
                          const SolverOptions& options) {
  require_wide_stencil(params);
  require_tol(options.tol);
  return solve_eigen(std::make_shared<const Grid>(build_grid(domain, h)), params, options);
}

double residual(const GridFunction& u, const OperatorParams& params, const GridFunction& rhs) {
  if (&u.grid() != &rhs.grid()) throw InvalidArgument("residual: grid functions live on different grids");
  const GridFunction dpu = dp_apply(u, params);
  double r = 0.0;
  for (Index i : u.grid().interior()) r = std::max(r, std::abs(dpu[i] + rhs[i]));
  return r;
}

double residual(const GridFunction& u, const OperatorParams& params, double rhs) {
  const GridFunction dpu = dp_apply(u, params);
  double r = 0.0;
  for (Index i : u.grid().interior()) r = std::max(r, std::abs(dpu[i] + rhs));
  return r;
}

}  // namespace dplap
