#include "dplap/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dplap/error.hpp"

namespace dplap::oracle {
namespace {

constexpr double kPi = std::numbers::pi;

void require_p(double p) {
  if (!(p >= 2.0)) throw InvalidArgument("p must be >= 2");
}

double det(const Dense& m) {
  const auto& a = m.a;
  switch (m.n) {
    case 1: return a[0][0];
    case 2: return a[0][0] * a[1][1] - a[0][1] * a[1][0];
    default:
      return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
             a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  }
}

// det(A - t I) for n = 3, with its derivative.
void char_poly3(const Dense& m, double t, double& value, double& slope) {
  const auto& a = m.a;
  const double c2 = a[0][0] + a[1][1] + a[2][2];
  const double c1 = a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2] - a[0][2] * a[2][0] +
                    a[1][1] * a[2][2] - a[1][2] * a[2][1];
  const double c0 = det(m);
  value = -t * t * t + c2 * t * t - c1 * t + c0;
  slope = -3.0 * t * t + 2.0 * c2 * t - c1;
}

double polish3(const Dense& m, double t) {
  for (int it = 0; it < 3; ++it) {
    double f = 0.0;
    double df = 0.0;
    char_poly3(m, t, f, df);
    if (df == 0.0 || !std::isfinite(df)) break;
    const double next = t - f / df;
    double g = 0.0;
    double dg = 0.0;
    char_poly3(m, next, g, dg);
    if (!(std::abs(g) < std::abs(f))) break;
    t = next;
  }
  return t;
}

void require_spd(const Dense& m, const char* what) {
  const auto ev = eigenvalues(m);
  if (!(ev[0] > 0.0)) throw InvalidArgument(std::string(what) + " is not positive definite");
}

Dense combine(double s, const Dense& x, double t, const Dense& y) {
  Dense out;
  out.n = x.n;
  for (int i = 0; i < x.n; ++i) {
    for (int j = 0; j < x.n; ++j) out.a[i][j] = s * x.a[i][j] + t * y.a[i][j];
  }
  return out;
}

}  // namespace

OracleSpec ball_torsion_exact(int n, double p, double radius) {
  require_p(p);
  if (n < 1 || n > 3) throw InvalidArgument("dimension must be 1, 2 or 3");
  if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
  const double denom = 2.0 * (n + p - 2.0);
  return {"ball-torsion", [=](const Coord& x) {
            double r2 = 0.0;
            for (int k = 0; k < x.size(); ++k) r2 += x[k] * x[k];
            return std::max(0.0, (radius * radius - r2) / denom);
          }};
}

OracleSpec interval_torsion_exact(double p, double length) {
  require_p(p);
  if (!(length > 0.0)) throw InvalidArgument("length must be positive");
  return {"interval-torsion", [=](const Coord& x) {
            const double t = x[0];
            return t <= 0.0 || t >= length ? 0.0 : t * (length - t) / (2.0 * (p - 1.0));
          }};
}

IntervalEigen interval_eigen_exact(double p, double length) {
  require_p(p);
  if (!(length > 0.0)) throw InvalidArgument("length must be positive");
  return {(p - 1.0) * kPi * kPi / (length * length), {"interval-eigen", [=](const Coord& x) {
                                                        const double t = x[0];
                                                        return t <= 0.0 || t >= length ? 0.0
                                                                                       : std::sin(kPi * t / length);
                                                      }}};
}

double box_poisson_value(const Coord& x, int terms) {
  if (terms < 1) throw InvalidArgument("series needs at least one term");
  if (x.size() != 2) throw InvalidArgument("box series is two-dimensional");
  double s = x[0];
  double t = x[1];
  if (s <= 0.0 || s >= 1.0 || t <= 0.0 || t >= 1.0) return 0.0;
  // Each odd mode is even about 1/2; fold so mirrored points share inputs.
  s = std::min(s, 1.0 - s);
  t = std::min(t, 1.0 - t);
  std::vector<double> sin_s(static_cast<std::size_t>(terms));
  std::vector<double> sin_t(static_cast<std::size_t>(terms));
  for (int k = 0; k < terms; ++k) {
    const double m = 2.0 * k + 1.0;
    sin_s[k] = std::sin(m * kPi * s);
    sin_t[k] = std::sin(m * kPi * t);
  }
  // Pair (m, n) with (n, m) so swapping s and t permutes identical sums.
  double sum = 0.0;
  for (int i = 0; i < terms; ++i) {
    const double m = 2.0 * i + 1.0;
    sum += sin_s[i] * sin_t[i] / (m * m * (2.0 * m * m));
    for (int j = i + 1; j < terms; ++j) {
      const double n = 2.0 * j + 1.0;
      sum += (sin_s[i] * sin_t[j] + sin_s[j] * sin_t[i]) / (m * n * (m * m + n * n));
    }
  }
  return 16.0 / (kPi * kPi * kPi * kPi) * sum;
}

OracleSpec box_poisson_series(int terms) {
  if (terms < 1) throw InvalidArgument("series needs at least one term");
  return {"box-poisson-series", [terms](const Coord& x) { return box_poisson_value(x, terms); }};
}

GridFunction box_poisson_reference(std::shared_ptr<const Grid> grid, int terms) {
  if (grid->dim() != 2) throw InvalidArgument("box series is two-dimensional");
  return GridFunction::sample(std::move(grid), [terms](const Coord& x) { return box_poisson_value(x, terms); });
}

OracleSpec quadratic(const SymMatrix& a) {
  const Dense m = Dense::from(a);
  return {"quadratic", [m](const Coord& x) { return 0.5 * quadratic_form(m, x); }};
}

Dense Dense::from(const SymMatrix& m) {
  Dense d;
  d.n = m.dim();
  for (int i = 0; i < d.n; ++i) {
    for (int j = 0; j < d.n; ++j) d.a[i][j] = m(i, j);
  }
  return d;
}

std::array<double, 3> eigenvalues(const Dense& m) {
  const auto& a = m.a;
  std::array<double, 3> ev{0.0, 0.0, 0.0};
  if (m.n == 1) {
    ev[0] = a[0][0];
    return ev;
  }
  if (m.n == 2) {
    const double mean = 0.5 * (a[0][0] + a[1][1]);
    const double half = 0.5 * (a[0][0] - a[1][1]);
    const double rad = std::sqrt(half * half + a[0][1] * a[0][1]);
    ev[0] = mean - rad;
    ev[1] = mean + rad;
    return ev;
  }
  const double off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
  const double q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
  const double p2 = (a[0][0] - q) * (a[0][0] - q) + (a[1][1] - q) * (a[1][1] - q) + (a[2][2] - q) * (a[2][2] - q) +
                    2.0 * off;
  if (p2 == 0.0) {
    ev = {a[0][0], a[1][1], a[2][2]};
    std::sort(ev.begin(), ev.end());
    return ev;
  }
  const double pp = std::sqrt(p2 / 6.0);
  Dense b = m;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) b.a[i][j] = (a[i][j] - (i == j ? q : 0.0)) / pp;
  }
  const double r = std::clamp(det(b) / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double hi = polish3(m, q + 2.0 * pp * std::cos(phi));
  const double lo = polish3(m, q + 2.0 * pp * std::cos(phi + 2.0 * kPi / 3.0));
  const double mid = polish3(m, 3.0 * q - hi - lo);
  ev = {lo, mid, hi};
  std::sort(ev.begin(), ev.end());
  return ev;
}

Dense inverse(const Dense& m) {
  const double d = det(m);
  if (d == 0.0 || !std::isfinite(d)) throw InvalidArgument("matrix is singular");
  const auto& a = m.a;
  Dense out;
  out.n = m.n;
  if (m.n == 1) {
    out.a[0][0] = 1.0 / d;
  } else if (m.n == 2) {
    out.a[0][0] = a[1][1] / d;
    out.a[0][1] = -a[0][1] / d;
    out.a[1][0] = -a[1][0] / d;
    out.a[1][1] = a[0][0] / d;
  } else {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        // Cofactor of entry (j, i).
        const int r0 = (j + 1) % 3;
        const int r1 = (j + 2) % 3;
        const int c0 = (i + 1) % 3;
        const int c1 = (i + 2) % 3;
        out.a[i][j] = (a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0]) / d;
      }
    }
  }
  return out;
}

double trace(const Dense& m) {
  double t = 0.0;
  for (int i = 0; i < m.n; ++i) t += m.a[i][i];
  return t;
}

double quadratic_form(const Dense& m, const Coord& q) {
  if (q.size() != m.n) throw InvalidArgument("vector and matrix dimensions differ");
  double s = 0.0;
  for (int i = 0; i < m.n; ++i) {
    for (int j = 0; j < m.n; ++j) s += q[i] * m.a[i][j] * q[j];
  }
  return s;
}

double dp_value(const Dense& m, double p) {
  require_p(p);
  return trace(m) + (p - 2.0) * eigenvalues(m)[static_cast<std::size_t>(m.n - 1)];
}

double dp_harmonic_slack(const std::vector<SymMatrix>& xs, const std::vector<double>& nu, double p) {
  require_p(p);
  if (xs.empty() || xs.size() != nu.size()) throw InvalidArgument("need one weight per matrix");
  double total = 0.0;
  for (double w : nu) {
    if (!(w >= 0.0)) throw InvalidArgument("weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("weights must sum to 1");
  const int n = xs.front().dim();
  Dense mean;
  mean.n = n;
  double rhs = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i].dim() != n) throw InvalidArgument("matrices differ in size");
    const Dense x = Dense::from(xs[i]);
    require_spd(x, "matrix");
    mean = combine(1.0, mean, nu[i], x);
    rhs += nu[i] / dp_value(inverse(x), p);
  }
  const double lhs = 1.0 / dp_value(inverse(mean), p);
  return lhs - rhs;
}

bool dp_harmonic_inequality_check(const std::vector<SymMatrix>& xs, const std::vector<double>& nu, double p) {
  return dp_harmonic_slack(xs, nu, p) >= -1e-10;
}

double jet_convexity_slack(const Coord& q, const SymMatrix& a1, const SymMatrix& a2, double mu) {
  if (!(mu >= 0.0 && mu <= 1.0)) throw InvalidArgument("mu must lie in [0, 1]");
  if (a1.dim() != a2.dim()) throw InvalidArgument("matrices differ in size");
  const Dense x = Dense::from(a1);
  const Dense y = Dense::from(a2);
  require_spd(x, "A1");
  require_spd(y, "A2");
  // y + mu (x - y) rather than mu x + (1 - mu) y: exact when x == y.
  const double lhs = quadratic_form(inverse(combine(1.0, y, mu, combine(1.0, x, -1.0, y))), q);
  const double fx = quadratic_form(inverse(x), q);
  const double fy = quadratic_form(inverse(y), q);
  const double rhs = fy + mu * (fx - fy);
  return rhs - lhs;
}

bool jet_convexity_check(const Coord& q, const SymMatrix& a1, const SymMatrix& a2, double mu) {
  return jet_convexity_slack(q, a1, a2, mu) >= -1e-10;
}

}  // namespace dplap::oracle
