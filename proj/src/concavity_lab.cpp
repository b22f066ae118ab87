#include "dplap/concavity_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dplap/error.hpp"

namespace dplap {
namespace {

MultiIndex neg(const MultiIndex& s) { return {-s[0], -s[1], -s[2]}; }

double region_range(const GridFunction& g, const RegionMask* region) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const Grid& grid = g.grid();
  for (Index i = 0; i < grid.size(); ++i) {
    if (!region_member(grid, region, i)) continue;
    lo = std::min(lo, g[i]);
    hi = std::max(hi, g[i]);
  }
  return hi > lo ? hi - lo : 0.0;
}

}  // namespace

GridFunction power_transform(const GridFunction& u, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("power transform exponent must lie in (0, 1]");
  const Grid& g = u.grid();
  GridFunction v(u.grid_ptr());
  for (Index i = 0; i < g.size(); ++i) {
    if (!g.is_active(i)) continue;
    if (u[i] < -1e-12) throw InvalidArgument("power transform of a negative value");
    v[i] = -std::pow(std::max(u[i], 0.0), alpha);
  }
  v.set_boundary(0.0);
  return v;
}

LogTransform log_transform(const GridFunction& u, double cutoff) {
  if (!(cutoff > 0.0)) throw InvalidArgument("log transform cutoff must be positive");
  const Grid& g = u.grid();
  const double top = u.max_interior();
  if (!(top > 0.0)) throw InvalidArgument("log transform of a function without positive values");
  LogTransform out{GridFunction(u.grid_ptr()), RegionMask(static_cast<std::size_t>(g.size()), false)};
  bool any = false;
  for (Index i = 0; i < g.size(); ++i) {
    out.v[i] = std::numeric_limits<double>::quiet_NaN();
    if (!g.is_active(i) || !(u[i] >= cutoff * top)) continue;
    out.v[i] = -std::log(u[i]);
    out.region[static_cast<std::size_t>(i)] = true;
    any = true;
  }
  if (!any) throw InvalidArgument("log transform region is empty");
  return out;
}

MidpointReport midpoint_concavity_report(const GridFunction& g, const RegionMask* region, long n_samples,
                                         std::uint64_t seed, double threshold, std::size_t keep) {
  if (n_samples < 0) throw InvalidArgument("sample count must be nonnegative");
  const Grid& grid = g.grid();
  std::vector<Index> points;
  for (Index i = 0; i < grid.size(); ++i) {
    if (region_member(grid, region, i)) points.push_back(i);
  }
  MidpointReport out;
  if (points.empty()) return out;

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
  const int n = grid.dim();
  for (long s = 0; s < n_samples; ++s) {
    const Index a = points[pick(rng)];
    const Index b = points[pick(rng)];
    const MultiIndex ma = grid.multi(a);
    const MultiIndex mb = grid.multi(b);
    // The midpoint sits on a lattice point or at the center of a cell face or
    // cell; its multilinear value is the mean over the surrounding corners.
    MultiIndex base{0, 0, 0};
    int odd_axes[3];
    int n_odd = 0;
    for (int k = 0; k < n; ++k) {
      const int sum = ma[k] + mb[k];
      base[k] = sum / 2;
      if (sum % 2 != 0) odd_axes[n_odd++] = k;
    }
    double mid_value = 0.0;
    bool inside = true;
    const int corners = 1 << n_odd;
    for (int c = 0; c < corners && inside; ++c) {
      MultiIndex m = base;
      for (int q = 0; q < n_odd; ++q) {
        if (c & (1 << q)) ++m[odd_axes[q]];
      }
      const Index j = grid.in_lattice(m) ? grid.flat(m) : -1;
      if (j < 0 || !region_member(grid, region, j)) {
        inside = false;
      } else {
        mid_value += g[j];
      }
    }
    if (!inside) {
      ++out.pairs_skipped;
      continue;
    }
    mid_value /= corners;
    ++out.pairs_tested;
    const double violation = 0.5 * (g[a] + g[b]) - mid_value;
    out.max_violation = std::max(out.max_violation, violation);
    if (violation > threshold && out.violations.size() < keep) {
      const Coord xa = grid.coord(a);
      const Coord xb = grid.coord(b);
      out.violations.push_back({xa, xb, 0.5 * (xa + xb), violation});
    }
  }
  return out;
}

HessianCheck hessian_concavity_check(const GridFunction& g, const StencilSet& directions, double threshold,
                                     const RegionMask* region) {
  const Grid& grid = g.grid();
  if (directions.dim() != grid.dim()) throw InvalidArgument("stencil and grid dimensions differ");
  HessianCheck out;
  out.worst = -std::numeric_limits<double>::infinity();
  for (Index x : free_points(grid, region)) {
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& d : directions.directions()) {
      const Index up = grid.shifted(x, d.step);
      const Index down = grid.shifted(x, neg(d.step));
      if (up < 0 || down < 0 || !region_member(grid, region, up) || !region_member(grid, region, down)) continue;
      top = std::max(top, g[up] + g[down] - 2.0 * g[x]);
    }
    out.worst = std::max(out.worst, top);
    if (top > threshold) ++out.count;
  }
  if (!std::isfinite(out.worst)) out.worst = 0.0;
  return out;
}

std::string to_string(Theorem t) { return t == Theorem::sqrt_concavity ? "sqrt" : "log"; }

Theorem theorem_from_string(const std::string& name) {
  if (name == "sqrt" || name == "sqrt-concavity") return Theorem::sqrt_concavity;
  if (name == "log" || name == "log-concavity") return Theorem::log_concavity;
  throw InvalidArgument("unknown theorem '" + name + "' (expected sqrt or log)");
}

ConcavityReport measure_concavity(const GridFunction& u, Theorem which, const StencilSet& directions,
                                  const ConcavityConfig& config) {
  if (!(config.tau_factor > 0.0)) throw InvalidArgument("tau factor must be positive");
  const Grid& grid = u.grid();
  ConcavityReport r;
  r.tau = config.tau_factor * grid.h();
  r.seed = config.seed;

  GridFunction v;
  RegionMask mask;
  const RegionMask* region = nullptr;
  if (which == Theorem::sqrt_concavity) {
    r.transform = "power";
    r.alpha = config.alpha;
    v = power_transform(u, config.alpha);
  } else {
    r.transform = "log";
    r.cutoff = config.cutoff;
    auto lt = log_transform(u, config.cutoff);
    v = std::move(lt.v);
    mask = std::move(lt.region);
    region = &mask;
  }
  GridFunction g = v;
  for (Index i = 0; i < grid.size(); ++i) {
    if (region_member(grid, region, i)) g[i] = -v[i];
  }
  r.scale = region_range(g, region);
  const double limit = r.tau * r.scale;

  // Boundary points carry Dirichlet data but sit up to h*sqrt(n) outside the
  // domain, so midpoint pairs are drawn from points inside it.
  RegionMask inside(static_cast<std::size_t>(grid.size()), false);
  for (Index i : grid.interior()) inside[static_cast<std::size_t>(i)] = region_member(grid, region, i);
  const auto mid = midpoint_concavity_report(g, &inside, config.n_samples, config.seed, limit, config.keep_violations);
  r.n_pairs_tested = mid.pairs_tested;
  r.n_pairs_skipped = mid.pairs_skipped;
  r.max_midpoint_violation = mid.max_violation;
  r.violations = mid.violations;

  const auto hess = hessian_concavity_check(g, directions, limit, region);
  r.hessian_violation_count = hess.count;
  r.hessian_worst = hess.worst;

  EnvelopeOptions eo;
  eo.region = region;
  eo.allow_nonconvex = true;
  if (!grid.domain_convex()) r.warnings.push_back("domain is not convex; envelope restricted to lattice lines inside it");
  const auto env = convex_envelope(v, directions, config.envelope_tol, eo);
  r.envelope_gap = env.gap;
  r.envelope_iterations = env.iterations;

  r.pass = r.max_midpoint_violation <= limit && r.hessian_violation_count == 0 && r.envelope_gap <= limit;
  return r;
}

VerifyOutcome verify_theorem(const DomainSpec& domain, const OperatorParams& params, double h, Theorem which,
                             const ConcavityConfig& config, const SolverOptions& solver) {
  VerifyOutcome out;
  std::vector<std::string> warnings;
  if (!domain.convex()) warnings.push_back("domain is not convex; outside the hypotheses of both theorems");
  if (which == Theorem::sqrt_concavity && !domain.interior_sphere()) {
    warnings.push_back("domain lacks the interior sphere condition");
  }
  if (which == Theorem::sqrt_concavity) {
    auto sol = solve_torsion(domain, params, h, solver);
    out.u = std::move(sol.u);
    out.solve = std::move(sol.report);
  } else {
    auto sol = solve_eigen(domain, params, h, solver);
    out.u = std::move(sol.pair.eigenfunction);
    out.lambda = sol.pair.lambda;
    out.solve = std::move(sol.report);
  }
  out.report = measure_concavity(out.u, which, params.directions(), config);
  out.report.warnings.insert(out.report.warnings.begin(), warnings.begin(), warnings.end());
  return out;
}

CriticalExponent critical_exponent(const DomainSpec& domain, const OperatorParams& params, double h, double lo,
                                   double hi, const ConcavityConfig& config, const SolverOptions& solver,
                                   double alpha_tol) {
  if (!(lo > 0.0 && lo <= hi && hi <= 1.0)) throw InvalidArgument("alpha range must satisfy 0 < lo <= hi <= 1");
  if (!(alpha_tol > 0.0)) throw InvalidArgument("alpha tolerance must be positive");
  const auto u = solve_torsion(domain, params, h, solver).u;
  CriticalExponent out;
  auto passes = [&](double alpha) {
    ConcavityConfig c = config;
    c.alpha = alpha;
    ++out.evaluations;
    return measure_concavity(u, Theorem::sqrt_concavity, params.directions(), c).pass;
  };
  out.lo_passes = passes(lo);
  out.hi_passes = passes(hi);
  if (out.hi_passes) {
    out.alpha = hi;
    return out;
  }
  if (!out.lo_passes) return out;
  double good = lo;
  double bad = hi;
  while (bad - good > alpha_tol) {
    const double mid = 0.5 * (good + bad);
    if (passes(mid)) {
      good = mid;
    } else {
      bad = mid;
    }
  }
  out.alpha = good;
  return out;
}

}  // namespace dplap
