#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dplap/dominative_operator.hpp"
#include "dplap/domain.hpp"
#include "dplap/solvers.hpp"

namespace dplap::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kNotConverged = 2, kVerifyFailed = 3 };

/// Everything a command needs. The file form is TOML-style:
///
///   p = 3
///   h = 0.015625
///   [domain]
///   shape = "ball"
///   center = [0, 0]
///   [verify]
///   which = "sqrt"
///
/// Top-level keys: p, h, directions, method, tol, max_iterations, seed,
/// output_dir. Sections: [domain], [verify], [converge], [sweep],
/// [critical-alpha]. Shape parameters left empty take per-shape defaults.
struct RunConfig {
  // [domain]
  std::string shape = "ball";
  int dim = 2;
  std::vector<double> center;
  std::optional<double> radius;
  std::vector<double> lo;
  std::vector<double> hi;
  std::vector<double> semi_axes;
  std::vector<double> segment_a;
  std::vector<double> segment_b;
  std::vector<double> normals;  // row-major, dim entries per face
  std::vector<double> offsets;

  double p = 2.0;
  double h = 1.0 / 32.0;
  int directions = 0;  // 0: default stencil for the dimension
  std::string method = "policy-iteration";
  std::optional<double> tol;  // unset: 1e-6 in 1D, 1e-4 otherwise
  int max_iterations = 0;
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  // [verify]; also read by envelope and critical-alpha
  std::string which = "sqrt";
  double alpha = 0.5;
  double epsilon = 0.05;
  double tau_factor = 5.0;
  long samples = 100'000;
  long keep_violations = 0;

  // [converge]
  int levels = 3;
  int terms = 200;

  // [sweep]; empty means just p
  std::vector<double> p_list;

  // [critical-alpha]
  double alpha_lo = 0.05;
  double alpha_hi = 1.0;
  double alpha_tol = 0.01;

  bool operator==(const RunConfig&) const = default;
};

/// Throws ConfigError naming the offending key.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);
std::string to_toml(const RunConfig& config);

/// Checks every field and builds the domain, stencil and solver settings;
/// throws ConfigError before any computation starts.
void validate(const RunConfig& config);

DomainSpec make_domain(const RunConfig& config);
OperatorParams make_params(const RunConfig& config);
SolverOptions make_solver_options(const RunConfig& config);

// Commands write their files under config.output_dir and return an exit code.
// Failures are reported on `log` and mapped to exit codes 1 and 2.
int cmd_solve(const RunConfig& config, std::ostream& log);
int cmd_eigen(const RunConfig& config, std::ostream& log);
int cmd_verify(const RunConfig& config, std::ostream& log);
int cmd_envelope(const RunConfig& config, std::ostream& log);
int cmd_converge(const RunConfig& config, std::ostream& log);
int cmd_sweep(const RunConfig& config, std::ostream& log);
int cmd_critical_alpha(const RunConfig& config, std::ostream& log);

/// Full command-line entry point.
int run(int argc, char** argv, std::ostream& out, std::ostream& log);

}  // namespace dplap::cli
