#include "dplap/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "dplap/concavity_lab.hpp"
#include "dplap/convex_envelope.hpp"
#include "dplap/error.hpp"
#include "dplap/format.hpp"
#include "dplap/grid.hpp"
#include "dplap/oracles.hpp"

namespace dplap::cli {
namespace {

namespace fs = std::filesystem;

constexpr double kConvergeTol = 1e-10;

// ---------------------------------------------------------------- parsing

double parse_number(const std::string& key, const std::string& text) {
  // Accepts plain decimals and fractions such as 1/64.
  auto whole = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw ConfigError("invalid number '" + text + "' for '" + key + "'");
    return v;
  };
  const auto slash = text.find('/');
  const double v = slash == std::string::npos ? whole(text)
                                              : whole(text.substr(0, slash)) / whole(text.substr(slash + 1));
  if (!std::isfinite(v)) throw ConfigError("'" + key + "' must be finite");
  return v;
}

long parse_integer(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw ConfigError("invalid integer '" + text + "' for '" + key + "'");
  return v;
}

const std::string& single(const std::string& key, const std::vector<std::string>& inputs) {
  if (inputs.size() != 1) throw ConfigError("'" + key + "' expects a single value");
  return inputs.front();
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::vector<std::string>&)>;

Setter number(double RunConfig::*field) {
  return [field](RunConfig& c, const std::string& k, const std::vector<std::string>& in) {
    c.*field = parse_number(k, single(k, in));
  };
}

Setter optional_number(std::optional<double> RunConfig::*field) {
  return [field](RunConfig& c, const std::string& k, const std::vector<std::string>& in) {
    c.*field = parse_number(k, single(k, in));
  };
}

template <class Int>
Setter integer(Int RunConfig::*field) {
  return [field](RunConfig& c, const std::string& k, const std::vector<std::string>& in) {
    c.*field = static_cast<Int>(parse_integer(k, single(k, in)));
  };
}

Setter text(std::string RunConfig::*field) {
  return [field](RunConfig& c, const std::string& k, const std::vector<std::string>& in) {
    c.*field = single(k, in);
  };
}

Setter list(std::vector<double> RunConfig::*field) {
  return [field](RunConfig& c, const std::string& k, const std::vector<std::string>& in) {
    std::vector<double> out;
    for (const auto& s : in) {
      if (!s.empty()) out.push_back(parse_number(k, s));
    }
    c.*field = std::move(out);
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"p", number(&RunConfig::p)},
      {"h", number(&RunConfig::h)},
      {"directions", integer(&RunConfig::directions)},
      {"method", text(&RunConfig::method)},
      {"tol", optional_number(&RunConfig::tol)},
      {"max_iterations", integer(&RunConfig::max_iterations)},
      {"seed",
       [](RunConfig& c, const std::string& k, const std::vector<std::string>& in) {
         const long v = parse_integer(k, single(k, in));
         if (v < 0) throw ConfigError("'seed' must be nonnegative");
         c.seed = static_cast<std::uint64_t>(v);
       }},
      {"output_dir", text(&RunConfig::output_dir)},
      {"domain.shape", text(&RunConfig::shape)},
      {"domain.dim", integer(&RunConfig::dim)},
      {"domain.center", list(&RunConfig::center)},
      {"domain.radius", optional_number(&RunConfig::radius)},
      {"domain.lo", list(&RunConfig::lo)},
      {"domain.hi", list(&RunConfig::hi)},
      {"domain.semi_axes", list(&RunConfig::semi_axes)},
      {"domain.segment_a", list(&RunConfig::segment_a)},
      {"domain.segment_b", list(&RunConfig::segment_b)},
      {"domain.normals", list(&RunConfig::normals)},
      {"domain.offsets", list(&RunConfig::offsets)},
      {"verify.which", text(&RunConfig::which)},
      {"verify.alpha", number(&RunConfig::alpha)},
      {"verify.epsilon", number(&RunConfig::epsilon)},
      {"verify.tau_factor", number(&RunConfig::tau_factor)},
      {"verify.samples", integer(&RunConfig::samples)},
      {"verify.keep_violations", integer(&RunConfig::keep_violations)},
      {"converge.levels", integer(&RunConfig::levels)},
      {"converge.terms", integer(&RunConfig::terms)},
      {"sweep.p_list", list(&RunConfig::p_list)},
      {"critical-alpha.alpha_lo", number(&RunConfig::alpha_lo)},
      {"critical-alpha.alpha_hi", number(&RunConfig::alpha_hi)},
      {"critical-alpha.alpha_tol", number(&RunConfig::alpha_tol)},
  };
  return table;
}

// ---------------------------------------------------------------- output

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(static_cast<unsigned char>(ch)));
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out + "\"";
}

// One-level JSON object with keys in insertion order.
class FlatJson {
 public:
  FlatJson& add(const std::string& key, const std::string& value) { return raw(key, quote(value)); }
  FlatJson& add(const std::string& key, const char* value) { return raw(key, quote(value)); }
  FlatJson& add(const std::string& key, double value) {
    return raw(key, std::isfinite(value) ? fmt_double(value) : "null");
  }
  FlatJson& add(const std::string& key, long value) { return raw(key, std::to_string(value)); }
  FlatJson& add(const std::string& key, int value) { return raw(key, std::to_string(value)); }
  FlatJson& add(const std::string& key, std::uint64_t value) { return raw(key, std::to_string(value)); }
  FlatJson& add(const std::string& key, bool value) { return raw(key, value ? "true" : "false"); }

  void write(const fs::path& path) const {
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path.string());
    os << "{\n";
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      os << "  " << quote(entries_[i].first) << ": " << entries_[i].second << (i + 1 < entries_.size() ? ",\n" : "\n");
    }
    os << "}\n";
  }

 private:
  FlatJson& raw(const std::string& key, std::string value) {
    entries_.emplace_back(key, std::move(value));
    return *this;
  }
  std::vector<std::pair<std::string, std::string>> entries_;
};

fs::path output_dir(const RunConfig& c) {
  fs::path dir(c.output_dir);
  fs::create_directories(dir);
  return dir;
}

void write_history(const fs::path& path, const std::vector<double>& history) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  os << "iteration,residual\n";
  for (std::size_t i = 0; i < history.size(); ++i) os << i + 1 << ',' << fmt_double(history[i]) << '\n';
}

void add_run_fields(FlatJson& j, const std::string& command, const RunConfig& c, const DomainSpec& d,
                    const OperatorParams& params, const SolverOptions& opts) {
  j.add("command", command)
      .add("domain", d.describe())
      .add("shape", to_string(d.shape()))
      .add("dim", d.dim())
      .add("p", c.p)
      .add("h", c.h)
      .add("directions", params.directions().count())
      .add("scheme", to_string(params.scheme()))
      .add("method", to_string(opts.method))
      .add("tol", opts.tol);
}

template <class F>
int guarded(std::ostream& log, F&& body) {
  try {
    return body();
  } catch (const ConvergenceError& e) {
    log << "error: " << e.what() << '\n';
    return kNotConverged;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const fs::filesystem_error& e) {
    log << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

Coord vec(const std::vector<double>& v) {
  Coord c(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) c[static_cast<Eigen::Index>(i)] = v[i];
  return c;
}

Coord filled(int n, double value) { return Coord::Constant(n, value); }

ConcavityConfig concavity_config(const RunConfig& c) {
  ConcavityConfig cc;
  cc.tau_factor = c.tau_factor;
  cc.n_samples = c.samples;
  cc.seed = c.seed;
  cc.alpha = c.alpha;
  cc.cutoff = c.epsilon;
  cc.keep_violations = static_cast<std::size_t>(c.keep_violations);
  return cc;
}

void add_report(FlatJson& j, const ConcavityReport& r) {
  j.add("transform", r.transform)
      .add("alpha", r.alpha)
      .add("cutoff", r.cutoff)
      .add("tau", r.tau)
      .add("scale", r.scale)
      .add("seed", r.seed)
      .add("n_pairs_tested", r.n_pairs_tested)
      .add("n_pairs_skipped", r.n_pairs_skipped)
      .add("max_midpoint_violation", r.max_midpoint_violation)
      .add("hessian_violation_count", r.hessian_violation_count)
      .add("hessian_worst", r.hessian_worst)
      .add("envelope_gap", r.envelope_gap)
      .add("envelope_iterations", r.envelope_iterations)
      .add("verdict", r.pass ? "pass" : "fail");
  std::string warnings;
  for (const auto& w : r.warnings) warnings += (warnings.empty() ? "" : "; ") + w;
  j.add("warnings", warnings);
}

// Exact solution for the torsion problem on this domain, if one is known.
std::optional<std::function<double(const Coord&)>> torsion_oracle(const RunConfig& c, const DomainSpec& d) {
  if (d.shape() == Shape::ball) {
    const auto o = oracle::ball_torsion_exact(d.dim(), c.p, d.radius());
    const Coord center = d.center();
    return [o, center](const Coord& x) { return o.evaluate(x - center); };
  }
  if (d.shape() == Shape::box && d.dim() == 1) {
    const auto o = oracle::interval_torsion_exact(c.p, d.hi()[0] - d.lo()[0]);
    const Coord lo = d.lo();
    return [o, lo](const Coord& x) { return o.evaluate(x - lo); };
  }
  if (d.shape() == Shape::box && d.dim() == 2 && c.p == 2.0 && d.lo() == Coord::Zero(2) && d.hi() == Coord::Ones(2)) {
    const int terms = c.terms;
    return [terms](const Coord& x) { return oracle::box_poisson_value(x, terms); };
  }
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------- config

RunConfig parse_config(std::istream& in) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  RunConfig c;
  const auto& table = setters();
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    const std::string key = item.fullname();
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(c, key, item.inputs);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  return parse_config(in);
}

std::string to_toml(const RunConfig& c) {
  std::ostringstream os;
  auto str = [](const std::string& s) { return quote(s); };
  auto arr = [](const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt_double(v[i]);
    return s + "]";
  };
  os << "p = " << fmt_double(c.p) << '\n';
  os << "h = " << fmt_double(c.h) << '\n';
  os << "directions = " << c.directions << '\n';
  os << "method = " << str(c.method) << '\n';
  if (c.tol) os << "tol = " << fmt_double(*c.tol) << '\n';
  os << "max_iterations = " << c.max_iterations << '\n';
  os << "seed = " << c.seed << '\n';
  os << "output_dir = " << str(c.output_dir) << '\n';
  os << "\n[domain]\n";
  os << "shape = " << str(c.shape) << '\n';
  os << "dim = " << c.dim << '\n';
  const std::pair<const char*, const std::vector<double>*> lists[] = {
      {"center", &c.center},       {"lo", &c.lo},           {"hi", &c.hi},
      {"semi_axes", &c.semi_axes}, {"segment_a", &c.segment_a}, {"segment_b", &c.segment_b},
      {"normals", &c.normals},     {"offsets", &c.offsets},
  };
  for (const auto& [name, values] : lists) {
    if (!values->empty()) os << name << " = " << arr(*values) << '\n';
  }
  if (c.radius) os << "radius = " << fmt_double(*c.radius) << '\n';
  os << "\n[verify]\n";
  os << "which = " << str(c.which) << '\n';
  os << "alpha = " << fmt_double(c.alpha) << '\n';
  os << "epsilon = " << fmt_double(c.epsilon) << '\n';
  os << "tau_factor = " << fmt_double(c.tau_factor) << '\n';
  os << "samples = " << c.samples << '\n';
  os << "keep_violations = " << c.keep_violations << '\n';
  os << "\n[converge]\n";
  os << "levels = " << c.levels << '\n';
  os << "terms = " << c.terms << '\n';
  os << "\n[sweep]\n";
  os << "p_list = " << arr(c.p_list) << '\n';
  os << "\n[critical-alpha]\n";
  os << "alpha_lo = " << fmt_double(c.alpha_lo) << '\n';
  os << "alpha_hi = " << fmt_double(c.alpha_hi) << '\n';
  os << "alpha_tol = " << fmt_double(c.alpha_tol) << '\n';
  return os.str();
}

DomainSpec make_domain(const RunConfig& c) {
  try {
    const std::string& s = c.shape;
    const Shape shape = shape_from_string(s);
    if (s == "interval") {
      const double lo = c.lo.empty() ? 0.0 : c.lo.front();
      const double hi = c.hi.empty() ? 1.0 : c.hi.front();
      if (c.lo.size() > 1 || c.hi.size() > 1) throw ConfigError("interval bounds take one value each");
      return DomainSpec::interval(lo, hi);
    }
    switch (shape) {
      case Shape::ball:
        return DomainSpec::ball(c.center.empty() ? filled(c.dim, 0.0) : vec(c.center), c.radius.value_or(1.0));
      case Shape::box:
        return DomainSpec::box(c.lo.empty() ? filled(c.dim, 0.0) : vec(c.lo),
                               c.hi.empty() ? filled(c.dim, 1.0) : vec(c.hi));
      case Shape::ellipse: {
        Coord axes = c.semi_axes.empty() ? Coord() : vec(c.semi_axes);
        if (c.semi_axes.empty()) {
          axes = c.dim == 3 ? Coord((Coord(3) << 1.0, 0.8, 0.6).finished()) : Coord((Coord(2) << 1.0, 0.6).finished());
        }
        return DomainSpec::ellipse(c.center.empty() ? filled(static_cast<int>(axes.size()), 0.0) : vec(c.center),
                                   axes);
      }
      case Shape::stadium: {
        const Coord a = c.segment_a.empty() ? Coord((Coord(2) << -0.5, 0.0).finished()) : vec(c.segment_a);
        const Coord b = c.segment_b.empty() ? Coord((Coord(2) << 0.5, 0.0).finished()) : vec(c.segment_b);
        return DomainSpec::stadium(a, b, c.radius.value_or(0.5));
      }
      case Shape::l_shape: {
        if (c.lo.size() > 1 || c.hi.size() > 1) throw ConfigError("l-shape bounds take one value each");
        return DomainSpec::l_shape(c.lo.empty() ? 0.0 : c.lo.front(), c.hi.empty() ? 1.0 : c.hi.front());
      }
      case Shape::halfspaces: {
        std::vector<Halfspace> faces;
        if (c.normals.empty() && c.offsets.empty()) {
          // Unit right triangle.
          faces = {{(Coord(2) << -1.0, 0.0).finished(), 0.0},
                   {(Coord(2) << 0.0, -1.0).finished(), 0.0},
                   {(Coord(2) << 1.0, 1.0).finished(), 1.0}};
        } else {
          const std::size_t n = static_cast<std::size_t>(c.dim);
          if (c.normals.size() != n * c.offsets.size()) {
            throw ConfigError("'domain.normals' needs dim entries per offset");
          }
          for (std::size_t f = 0; f < c.offsets.size(); ++f) {
            Coord normal(static_cast<Eigen::Index>(n));
            for (std::size_t k = 0; k < n; ++k) normal[static_cast<Eigen::Index>(k)] = c.normals[f * n + k];
            faces.push_back({normal, c.offsets[f]});
          }
        }
        return DomainSpec::halfspace_intersection(std::move(faces));
      }
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("domain: ") + e.what());
  }
  throw ConfigError("domain: unsupported shape");
}

OperatorParams make_params(const RunConfig& c) {
  const int n = make_domain(c).dim();
  try {
    const StencilSet s = c.directions == 0 ? StencilSet::default_for(n) : StencilSet::with_directions(n, c.directions);
    return OperatorParams(c.p, s, Scheme::wide_stencil);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("'directions': ") + e.what());
  }
}

SolverOptions make_solver_options(const RunConfig& c) {
  SolverOptions o;
  try {
    o.method = method_from_string(c.method);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("method: ") + e.what());
  }
  o.tol = c.tol.value_or(default_tolerance(make_domain(c).dim()));
  o.max_iterations = c.max_iterations;
  return o;
}

void validate(const RunConfig& c) {
  if (!(c.p >= 2.0)) throw ConfigError("'p' must be >= 2");
  if (!(c.h > 0.0)) throw ConfigError("'h' must be positive");
  if (c.tol && !(*c.tol > 0.0)) throw ConfigError("'tol' must be positive");
  if (c.dim < 1 || c.dim > 3) throw ConfigError("'domain.dim' must be 1, 2 or 3");
  if (c.max_iterations < 0) throw ConfigError("'max_iterations' must be nonnegative");
  if (c.output_dir.empty()) throw ConfigError("'output_dir' must not be empty");
  make_domain(c);
  make_params(c);
  make_solver_options(c);
  try {
    theorem_from_string(c.which);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("verify.which: ") + e.what());
  }
  if (!(c.alpha > 0.0 && c.alpha <= 1.0)) throw ConfigError("'verify.alpha' must lie in (0, 1]");
  if (!(c.epsilon > 0.0 && c.epsilon < 1.0)) throw ConfigError("'verify.epsilon' must lie in (0, 1)");
  if (!(c.tau_factor > 0.0)) throw ConfigError("'verify.tau_factor' must be positive");
  if (c.samples < 0) throw ConfigError("'verify.samples' must be nonnegative");
  if (c.keep_violations < 0) throw ConfigError("'verify.keep_violations' must be nonnegative");
  if (c.levels < 2) throw ConfigError("'converge.levels' must be at least 2");
  if (c.terms < 50) throw ConfigError("'converge.terms' must be at least 50");
  for (double q : c.p_list) {
    if (!(q >= 2.0)) throw ConfigError("'sweep.p_list' entries must be >= 2");
  }
  if (!(c.alpha_lo > 0.0 && c.alpha_lo <= c.alpha_hi && c.alpha_hi <= 1.0)) {
    throw ConfigError("critical-alpha range must satisfy 0 < alpha_lo <= alpha_hi <= 1");
  }
  if (!(c.alpha_tol > 0.0)) throw ConfigError("'critical-alpha.alpha_tol' must be positive");
}

// ---------------------------------------------------------------- commands

int cmd_solve(const RunConfig& c, std::ostream& log) {
  return guarded(log, [&] {
    validate(c);
    const auto domain = make_domain(c);
    const auto params = make_params(c);
    const auto opts = make_solver_options(c);
    const auto sol = solve_torsion(domain, params, c.h, opts);
    const auto dir = output_dir(c);
    write_csv((dir / "solution.csv").string(), sol.u);
    write_history(dir / "residuals.csv", sol.report.residual_history);
    FlatJson j;
    add_run_fields(j, "solve", c, domain, params, opts);
    j.add("interior_points", static_cast<long>(sol.u.grid().interior().size()))
        .add("iterations", sol.report.iterations)
        .add("final_residual", sol.report.final_residual)
        .add("inner_sweeps", sol.report.inner_sweeps)
        .add("time_step", sol.report.time_step)
        .add("time_step_bound", sol.report.time_step_bound)
        .add("max_u", sol.u.max_interior())
        .add("wall_time_s", sol.report.wall_time);
    j.write(dir / "report.json");
    log << "solve: max u = " << fmt_double(sol.u.max_interior()) << ", residual "
        << fmt_double(sol.report.final_residual) << '\n';
    return sol.report.final_residual <= opts.tol ? kOk : kNotConverged;
  });
}

int cmd_eigen(const RunConfig& c, std::ostream& log) {
  return guarded(log, [&] {
    validate(c);
    const auto domain = make_domain(c);
    const auto params = make_params(c);
    const auto opts = make_solver_options(c);
    const auto sol = solve_eigen(domain, params, c.h, opts);
    const auto dir = output_dir(c);
    write_csv((dir / "eigenfunction.csv").string(), sol.pair.eigenfunction);
    write_history(dir / "residuals.csv", sol.report.residual_history);
    FlatJson j;
    add_run_fields(j, "eigen", c, domain, params, opts);
    j.add("lambda", sol.pair.lambda)
        .add("residual", sol.pair.residual)
        .add("iterations", sol.report.iterations)
        .add("inner_sweeps", sol.report.inner_sweeps)
        .add("wall_time_s", sol.report.wall_time);
    j.write(dir / "eigen.json");
    log << "eigen: lambda = " << fmt_double(sol.pair.lambda) << '\n';
    return kOk;
  });
}

int cmd_verify(const RunConfig& c, std::ostream& log) {
  return guarded(log, [&] {
    validate(c);
    const auto domain = make_domain(c);
    const auto params = make_params(c);
    const auto opts = make_solver_options(c);
    const Theorem which = theorem_from_string(c.which);
    const auto out = verify_theorem(domain, params, c.h, which, concavity_config(c), opts);
    const auto dir = output_dir(c);
    FlatJson j;
    add_run_fields(j, "verify", c, domain, params, opts);
    j.add("which", to_string(which));
    add_report(j, out.report);
    if (which == Theorem::log_concavity) j.add("lambda", out.lambda);
    j.add("solve_residual", out.solve.final_residual).add("wall_time_s", out.solve.wall_time);
    j.write(dir / "concavity.json");
    if (c.keep_violations > 0) {
      std::ofstream os(dir / "violations.csv");
      const int n = domain.dim();
      const char* axes[] = {"x", "y", "z"};
      for (const char* prefix : {"a_", "b_", "mid_"}) {
        for (int k = 0; k < n; ++k) os << prefix << axes[k] << ',';
      }
      os << "violation\n";
      for (const auto& v : out.report.violations) {
        for (const Coord* pt : {&v.x, &v.y, &v.mid}) {
          for (int k = 0; k < n; ++k) os << fmt_double((*pt)[k]) << ',';
        }
        os << fmt_double(v.violation) << '\n';
      }
    }
    for (const auto& w : out.report.warnings) log << "warning: " << w << '\n';
    log << "verify " << to_string(which) << ": " << (out.report.pass ? "pass" : "fail") << '\n';
    return out.report.pass ? kOk : kVerifyFailed;
  });
}

int cmd_envelope(const RunConfig& c, std::ostream& log) {
  return guarded(log, [&] {
    validate(c);
    const auto domain = make_domain(c);
    const auto params = make_params(c);
    const auto opts = make_solver_options(c);
    const Theorem which = theorem_from_string(c.which);
    GridFunction v;
    RegionMask region;
    EnvelopeOptions eo;
    eo.allow_nonconvex = true;
    if (which == Theorem::sqrt_concavity) {
      v = power_transform(solve_torsion(domain, params, c.h, opts).u, c.alpha);
    } else {
      auto lt = log_transform(solve_eigen(domain, params, c.h, opts).pair.eigenfunction, c.epsilon);
      v = std::move(lt.v);
      region = std::move(lt.region);
      eo.region = &region;
    }
    const auto env = convex_envelope(v, params.directions(), 1e-12, eo);
    const auto dir = output_dir(c);
    write_csv((dir / "transformed.csv").string(), v);
    write_csv((dir / "envelope.csv").string(), env.envelope);
    FlatJson j;
    add_run_fields(j, "envelope", c, domain, params, opts);
    j.add("which", to_string(which))
        .add("alpha", which == Theorem::sqrt_concavity ? c.alpha : 0.0)
        .add("epsilon", which == Theorem::log_concavity ? c.epsilon : 0.0)
        .add("gap", env.gap)
        .add("iterations", env.iterations);
    j.write(dir / "envelope.json");
    if (!domain.convex()) log << "warning: domain is not convex\n";
    log << "envelope gap = " << fmt_double(env.gap) << '\n';
    return kOk;
  });
}

int cmd_converge(const RunConfig& c, std::ostream& log) {
  return guarded(log, [&] {
    validate(c);
    const auto domain = make_domain(c);
    const auto params = make_params(c);
    auto opts = make_solver_options(c);
    // Solver error must sit well below discretization error.
    if (!c.tol) opts.tol = kConvergeTol;
    const auto exact = torsion_oracle(c, domain);
    if (!exact) throw ConfigError("no exact solution available for this domain and p");
    std::vector<double> hs;
    std::vector<double> errors;
    double h = c.h;
    for (int level = 0; level < c.levels; ++level, h *= 0.5) {
      const auto sol = solve_torsion(domain, params, h, opts);
      double err = 0.0;
      for (Index i : sol.u.grid().interior()) {
        err = std::max(err, std::abs(sol.u[i] - (*exact)(sol.u.grid().coord(i))));
      }
      hs.push_back(h);
      errors.push_back(err);
    }
    // Least-squares slope of log error against log h.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double m = static_cast<double>(hs.size());
    for (std::size_t i = 0; i < hs.size(); ++i) {
      const double x = std::log(hs[i]);
      const double y = std::log(errors[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double fit = (m * sxy - sx * sy) / (m * sxx - sx * sx);

    const auto dir = output_dir(c);
    std::ofstream os(dir / "convergence.csv");
    os << "h,error,order\n";
    FlatJson j;
    add_run_fields(j, "converge", c, domain, params, opts);
    j.add("levels", c.levels);
    double worst_order = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < hs.size(); ++i) {
      os << fmt_double(hs[i]) << ',' << fmt_double(errors[i]) << ',';
      j.add("h_" + std::to_string(i), hs[i]).add("error_" + std::to_string(i), errors[i]);
      if (i > 0) {
        const double order = std::log2(errors[i - 1] / errors[i]);
        worst_order = std::min(worst_order, order);
        os << fmt_double(order);
        j.add("order_" + std::to_string(i), order);
      }
      os << '\n';
    }
    j.add("min_order", worst_order).add("fit_order", fit);
    j.write(dir / "converge.json");
    log << "converge: errors";
    for (double e : errors) log << ' ' << fmt_double(e);
    log << ", fitted order " << fmt_double(fit) << '\n';
    return kOk;
  });
}

int cmd_sweep(const RunConfig& c, std::ostream& log) {
  return guarded(log, [&] {
    validate(c);
    const auto domain = make_domain(c);
    const std::vector<double> ps = c.p_list.empty() ? std::vector<double>{c.p} : c.p_list;
    const auto dir = output_dir(c);
    std::ofstream os(dir / "sweep.csv");
    os << "p,max_u,scaled,deviation\n";
    FlatJson j;
    j.add("command", "sweep").add("domain", domain.describe()).add("h", c.h).add("rows", static_cast<long>(ps.size()));
    const int n = domain.dim();
    for (std::size_t i = 0; i < ps.size(); ++i) {
      RunConfig ci = c;
      ci.p = ps[i];
      const auto sol = solve_torsion(domain, make_params(ci), c.h, make_solver_options(ci));
      const double top = sol.u.max_interior();
      const double scaled = top * (n + ps[i] - 2.0);
      // On a ball of radius R the exact value of max u (n + p - 2) is R^2 / 2.
      const double deviation = domain.shape() == Shape::ball
                                   ? scaled - 0.5 * domain.radius() * domain.radius()
                                   : std::numeric_limits<double>::quiet_NaN();
      os << fmt_double(ps[i]) << ',' << fmt_double(top) << ',' << fmt_double(scaled) << ','
         << (std::isfinite(deviation) ? fmt_double(deviation) : "") << '\n';
      const std::string k = std::to_string(i);
      j.add("p_" + k, ps[i]).add("max_u_" + k, top).add("scaled_" + k, scaled).add("deviation_" + k, deviation);
    }
    j.write(dir / "sweep.json");
    log << "sweep: " << ps.size() << " rows\n";
    return kOk;
  });
}

int cmd_critical_alpha(const RunConfig& c, std::ostream& log) {
  return guarded(log, [&] {
    validate(c);
    const auto domain = make_domain(c);
    const std::vector<double> ps = c.p_list.empty() ? std::vector<double>{c.p} : c.p_list;
    const auto dir = output_dir(c);
    std::ofstream os(dir / "critical_alpha.csv");
    os << "domain,p,alpha_star,found,lo_passes,hi_passes,evaluations\n";
    FlatJson j;
    j.add("command", "critical-alpha")
        .add("domain", domain.describe())
        .add("h", c.h)
        .add("alpha_lo", c.alpha_lo)
        .add("alpha_hi", c.alpha_hi)
        .add("alpha_tol", c.alpha_tol);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      RunConfig ci = c;
      ci.p = ps[i];
      const auto r = critical_exponent(domain, make_params(ci), c.h, c.alpha_lo, c.alpha_hi, concavity_config(ci),
                                       make_solver_options(ci), c.alpha_tol);
      os << to_string(domain.shape()) << ',' << fmt_double(ps[i]) << ','
         << (r.alpha ? fmt_double(*r.alpha) : "") << ',' << (r.alpha ? "true" : "false") << ','
         << (r.lo_passes ? "true" : "false") << ',' << (r.hi_passes ? "true" : "false") << ',' << r.evaluations
         << '\n';
      const std::string k = std::to_string(i);
      j.add("p_" + k, ps[i])
          .add("alpha_star_" + k, r.alpha.value_or(std::numeric_limits<double>::quiet_NaN()))
          .add("found_" + k, r.alpha.has_value());
      if (!r.alpha) log << "critical-alpha: no passing alpha in range for p = " << fmt_double(ps[i]) << '\n';
    }
    j.write(dir / "critical_alpha.json");
    return kOk;
  });
}

// ---------------------------------------------------------------- entry

int run(int argc, char** argv, std::ostream& out, std::ostream& log) {
  CLI::App app{"Numerical laboratory for the dominative p-Laplacian", "dplap"};
  app.require_subcommand(1);
  // --h is grid spacing, so help takes the long form only.
  app.set_help_flag("--help", "Print this help message and exit");

  struct Flags {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> p;
    std::optional<std::string> h;
    std::optional<std::string> domain;
  } flags;

  using Command = int (*)(const RunConfig&, std::ostream&);
  const std::pair<const char*, std::pair<const char*, Command>> commands[] = {
      {"solve", {"Torsion problem -D_p u = 1", &cmd_solve}},
      {"eigen", {"First eigenpair of -D_p", &cmd_eigen}},
      {"verify", {"Concavity verdict for sqrt(u) or log(u)", &cmd_verify}},
      {"envelope", {"Convex envelope of the transformed solution", &cmd_envelope}},
      {"converge", {"Error and order against an exact solution", &cmd_converge}},
      {"sweep", {"max u (n + p - 2) over a list of p", &cmd_sweep}},
      {"critical-alpha", {"Largest exponent alpha with concave u^alpha", &cmd_critical_alpha}},
  };
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& [name, info] : commands) {
    CLI::App* sub = app.add_subcommand(name, info.first);
    sub->add_option("--config", flags.config, "Config file (TOML-style)");
    sub->add_option("--out", flags.out, "Output directory");
    sub->add_option("--seed", flags.seed, "Random seed");
    sub->add_option("--p", flags.p, "Override p");
    sub->add_option("--h", flags.h, "Override grid spacing (decimal or fraction such as 1/64)");
    sub->add_option("--domain", flags.domain, "Override domain shape");
    subs.emplace_back(sub, info.second);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, log);
    return code == 0 ? kOk : kConfigError;
  }

  RunConfig config;
  try {
    if (!flags.config.empty()) config = load_config(flags.config);
    if (flags.out) config.output_dir = *flags.out;
    if (flags.seed) config.seed = *flags.seed;
    if (flags.p) config.p = parse_number("--p", *flags.p);
    if (flags.h) config.h = parse_number("--h", *flags.h);
    if (flags.domain) config.shape = *flags.domain;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kConfigError;
  }
  for (const auto& [sub, command] : subs) {
    if (sub->parsed()) return command(config, log);
  }
  return kConfigError;
}

}  // namespace dplap::cli
