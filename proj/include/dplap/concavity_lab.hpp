#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dplap/convex_envelope.hpp"
#include "dplap/domain.hpp"
#include "dplap/grid.hpp"
#include "dplap/solvers.hpp"
#include "dplap/stencil.hpp"

namespace dplap {

/// v = -u^alpha on active points, 0 on boundary points. Rejects u below
/// -1e-12; smaller negative values are read as 0.
GridFunction power_transform(const GridFunction& u, double alpha);

struct LogTransform {
  GridFunction v;      // -ln u on the region, NaN elsewhere
  RegionMask region;   // active points with u >= cutoff * max u
};

/// v = -ln u on {u >= cutoff * max u}.
LogTransform log_transform(const GridFunction& u, double cutoff);

struct MidpointSample {
  Coord x;
  Coord y;
  Coord mid;
  double violation = 0.0;
};

struct MidpointReport {
  long pairs_tested = 0;
  long pairs_skipped = 0;
  /// max of 0 and (g(x) + g(y))/2 - g((x + y)/2) over tested pairs.
  double max_violation = 0.0;
  /// Pairs whose violation exceeded the threshold passed in.
  std::vector<MidpointSample> violations;
};

/// Midpoint test of concavity for g on `region` (all active points when
/// null). Pairs of region lattice points are drawn with a seeded generator;
/// the midpoint value is interpolated multilinearly, and pairs whose midpoint
/// cell leaves the region are skipped. At most `keep` pairs above `threshold`
/// are recorded.
MidpointReport midpoint_concavity_report(const GridFunction& g, const RegionMask* region, long n_samples,
                                         std::uint64_t seed, double threshold = 0.0, std::size_t keep = 0);

struct HessianCheck {
  long count = 0;
  /// Largest undivided second difference g(x+he) + g(x-he) - 2g(x) seen.
  double worst = 0.0;
};

/// Counts free points where some undivided directional second difference of
/// g exceeds `threshold`.
HessianCheck hessian_concavity_check(const GridFunction& g, const StencilSet& directions, double threshold,
                                     const RegionMask* region = nullptr);

enum class Theorem { sqrt_concavity, log_concavity };

std::string to_string(Theorem t);
Theorem theorem_from_string(const std::string& name);

struct ConcavityConfig {
  /// Measures must stay below tau_factor * h times the range of the concave
  /// candidate.
  double tau_factor = 5.0;
  long n_samples = 100'000;
  std::uint64_t seed = 1;
  /// Exponent of the power transform.
  double alpha = 0.5;
  /// Relative cutoff of the log region.
  double cutoff = 0.05;
  double envelope_tol = 1e-12;
  /// Midpoint violations above threshold to keep in the report.
  std::size_t keep_violations = 0;
};

struct ConcavityReport {
  std::string transform;  // "power" or "log"
  double alpha = 0.0;
  double cutoff = 0.0;
  double tau = 0.0;
  /// Range (max - min) of the concave candidate -v over the region.
  double scale = 0.0;
  long n_pairs_tested = 0;
  long n_pairs_skipped = 0;
  std::uint64_t seed = 0;
  double max_midpoint_violation = 0.0;
  long hessian_violation_count = 0;
  double hessian_worst = 0.0;
  double envelope_gap = 0.0;
  int envelope_iterations = 0;
  bool pass = false;
  std::vector<std::string> warnings;
  std::vector<MidpointSample> violations;
};

/// Transforms u and applies the three measures. Each of the midpoint
/// violation, the worst second difference and the envelope gap must be at
/// most tau * scale for a pass.
ConcavityReport measure_concavity(const GridFunction& u, Theorem which, const StencilSet& directions,
                                  const ConcavityConfig& config);

struct VerifyOutcome {
  ConcavityReport report;
  SolveReport solve;
  GridFunction u;
  double lambda = 0.0;  // log case only
};

/// Solves the torsion (sqrt case) or eigen (log case) problem and measures
/// concavity of u^alpha or ln u.
VerifyOutcome verify_theorem(const DomainSpec& domain, const OperatorParams& params, double h, Theorem which,
                             const ConcavityConfig& config, const SolverOptions& solver);

struct CriticalExponent {
  /// Largest passing alpha found, if any.
  std::optional<double> alpha;
  bool lo_passes = false;
  bool hi_passes = false;
  int evaluations = 0;
};

/// Bisection for the largest alpha in [lo, hi] whose power transform of the
/// torsion solution passes. Both ends are evaluated first.
CriticalExponent critical_exponent(const DomainSpec& domain, const OperatorParams& params, double h, double lo,
                                   double hi, const ConcavityConfig& config, const SolverOptions& solver,
                                   double alpha_tol = 1e-2);

}  // namespace dplap
