#include "dplap/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "dplap/error.hpp"

namespace dplap {
namespace {

void check_dim(int dim) {
  if (dim < 1 || dim > 3) {
    throw InvalidArgument("unsupported dimension " + std::to_string(dim) + " (expected 1, 2 or 3)");
  }
}

void check_finite(const Coord& x, const char* what) {
  if (!x.allFinite()) throw InvalidArgument(std::string(what) + " must be finite");
}

double box_sd(const Coord& lo, const Coord& hi, const Coord& x) {
  const Coord center = 0.5 * (lo + hi);
  const Coord half = 0.5 * (hi - lo);
  const Coord q = (x - center).cwiseAbs() - half;
  const double outside = q.cwiseMax(0.0).norm();
  const double inside = std::min(q.maxCoeff(), 0.0);
  return outside + inside;
}

double segment_distance(const Coord& a, const Coord& b, const Coord& x) {
  const Coord ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (x - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (x - (a + t * ab)).norm();
}

std::string coord_str(const Coord& x) {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
  os << ')';
  return os.str();
}

}  // namespace

std::string to_string(Shape shape) {
  switch (shape) {
    case Shape::ball: return "ball";
    case Shape::box: return "box";
    case Shape::halfspaces: return "halfspaces";
    case Shape::ellipse: return "ellipse";
    case Shape::stadium: return "stadium";
    case Shape::l_shape: return "l-shape";
  }
  return "?";
}

Shape shape_from_string(const std::string& name) {
  if (name == "ball") return Shape::ball;
  if (name == "box" || name == "interval") return Shape::box;
  if (name == "halfspaces" || name == "halfspace-intersection") return Shape::halfspaces;
  if (name == "ellipse") return Shape::ellipse;
  if (name == "stadium") return Shape::stadium;
  if (name == "l-shape" || name == "lshape") return Shape::l_shape;
  throw InvalidArgument("unknown domain shape '" + name + "'");
}

DomainSpec DomainSpec::ball(const Coord& center, double radius) {
  check_dim(static_cast<int>(center.size()));
  check_finite(center, "ball center");
  if (!(radius > 0.0)) throw InvalidArgument("ball radius must be positive");
  DomainSpec d(Shape::ball, static_cast<int>(center.size()));
  d.a_ = center;
  d.radius_ = radius;
  d.bbox_lo_ = center.array() - radius;
  d.bbox_hi_ = center.array() + radius;
  return d;
}

DomainSpec DomainSpec::box(const Coord& lo, const Coord& hi) {
  check_dim(static_cast<int>(lo.size()));
  if (lo.size() != hi.size()) throw InvalidArgument("box corners differ in dimension");
  check_finite(lo, "box corner");
  check_finite(hi, "box corner");
  if ((hi.array() <= lo.array()).any()) throw InvalidArgument("box requires lo < hi on every axis");
  DomainSpec d(Shape::box, static_cast<int>(lo.size()));
  d.a_ = lo;
  d.b_ = hi;
  d.bbox_lo_ = lo;
  d.bbox_hi_ = hi;
  return d;
}

DomainSpec DomainSpec::interval(double lo, double hi) {
  Coord a(1), b(1);
  a << lo;
  b << hi;
  return box(a, b);
}

DomainSpec DomainSpec::halfspace_intersection(std::vector<Halfspace> faces) {
  if (faces.empty()) throw InvalidArgument("halfspace intersection needs at least one face");
  const int dim = static_cast<int>(faces.front().normal.size());
  check_dim(dim);
  for (const auto& f : faces) {
    if (f.normal.size() != dim) throw InvalidArgument("halfspace normals differ in dimension");
    check_finite(f.normal, "halfspace normal");
    if (!(f.normal.norm() > 0.0)) throw InvalidArgument("halfspace normal must be nonzero");
  }
  DomainSpec d(Shape::halfspaces, dim);
  d.faces_ = std::move(faces);

  // Vertex enumeration: every dim-subset of face planes, keep feasible points.
  const auto& fs = d.faces_;
  const int m = static_cast<int>(fs.size());
  std::vector<Coord> vertices;
  std::vector<int> pick(dim);
  auto feasible = [&](const Coord& x) {
    for (const auto& f : fs) {
      if (f.normal.dot(x) - f.offset > 1e-9 * (1.0 + std::abs(f.offset))) return false;
    }
    return true;
  };
  auto recurse = [&](auto&& self, int start, int depth) -> void {
    if (depth == dim) {
      Eigen::MatrixXd a(dim, dim);
      Eigen::VectorXd rhs(dim);
      for (int r = 0; r < dim; ++r) {
        a.row(r) = fs[pick[r]].normal.transpose();
        rhs[r] = fs[pick[r]].offset;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      if (!lu.isInvertible()) return;
      Coord x = lu.solve(rhs);
      if (x.allFinite() && feasible(x)) vertices.push_back(x);
      return;
    }
    for (int i = start; i < m; ++i) {
      pick[depth] = i;
      self(self, i + 1, depth + 1);
    }
  };
  recurse(recurse, 0, 0);
  if (vertices.empty()) throw InvalidArgument("halfspace intersection is empty or unbounded");
  Coord lo = vertices.front(), hi = vertices.front();
  for (const auto& v : vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  if ((hi.array() <= lo.array()).any()) throw InvalidArgument("halfspace intersection has empty interior");
  // Boundedness probe: far points along axis and diagonal directions must be outside.
  const Coord mid = 0.5 * (lo + hi);
  const double far = 1e6 * (1.0 + (hi - lo).norm());
  for (int mask = 1; mask < (1 << dim) * (1 << dim); ++mask) {
    Coord dir = Coord::Zero(dim);
    for (int k = 0; k < dim; ++k) {
      const int code = (mask >> (2 * k)) & 3;
      dir[k] = code == 1 ? 1.0 : code == 2 ? -1.0 : 0.0;
    }
    if (dir.squaredNorm() == 0.0) continue;
    if (feasible(mid + far * dir.normalized())) throw InvalidArgument("halfspace intersection is unbounded");
  }
  d.bbox_lo_ = lo;
  d.bbox_hi_ = hi;
  return d;
}

DomainSpec DomainSpec::ellipse(const Coord& center, const Coord& semi_axes) {
  check_dim(static_cast<int>(center.size()));
  if (center.size() == 1) throw InvalidArgument("ellipse requires dimension 2 or 3");
  if (semi_axes.size() != center.size()) throw InvalidArgument("ellipse semi-axes differ in dimension");
  check_finite(center, "ellipse center");
  if (!(semi_axes.array() > 0.0).all() || !semi_axes.allFinite()) {
    throw InvalidArgument("ellipse semi-axes must be positive");
  }
  DomainSpec d(Shape::ellipse, static_cast<int>(center.size()));
  d.a_ = center;
  d.b_ = semi_axes;
  d.bbox_lo_ = center - semi_axes;
  d.bbox_hi_ = center + semi_axes;
  return d;
}

DomainSpec DomainSpec::stadium(const Coord& a, const Coord& b, double radius) {
  check_dim(static_cast<int>(a.size()));
  if (a.size() != b.size()) throw InvalidArgument("stadium endpoints differ in dimension");
  check_finite(a, "stadium endpoint");
  check_finite(b, "stadium endpoint");
  if (!(radius > 0.0)) throw InvalidArgument("stadium radius must be positive");
  DomainSpec d(Shape::stadium, static_cast<int>(a.size()));
  d.a_ = a;
  d.b_ = b;
  d.radius_ = radius;
  d.bbox_lo_ = a.cwiseMin(b).array() - radius;
  d.bbox_hi_ = a.cwiseMax(b).array() + radius;
  return d;
}

DomainSpec DomainSpec::l_shape(double lo, double hi) {
  if (!(hi > lo)) throw InvalidArgument("l-shape requires lo < hi");
  DomainSpec d(Shape::l_shape, 2);
  d.a_ = Coord::Constant(2, lo);
  d.b_ = Coord::Constant(2, hi);
  d.bbox_lo_ = d.a_;
  d.bbox_hi_ = d.b_;
  return d;
}

bool DomainSpec::interior_sphere() const noexcept {
  switch (shape_) {
    case Shape::ball:
    case Shape::ellipse:
    case Shape::stadium:
      return true;
    case Shape::box:
    case Shape::halfspaces:
      // Corners exist only for n >= 2.
      return dim_ == 1;
    case Shape::l_shape:
      return false;
  }
  return false;
}

double DomainSpec::signed_distance(const Coord& x) const {
  if (x.size() != dim_) throw InvalidArgument("point dimension does not match domain");
  if (!x.allFinite()) throw InvalidArgument("point must be finite");
  switch (shape_) {
    case Shape::ball:
      return (x - a_).norm() - radius_;
    case Shape::box:
      return box_sd(a_, b_, x);
    case Shape::halfspaces: {
      double worst = -std::numeric_limits<double>::infinity();
      for (const auto& f : faces_) worst = std::max(worst, (f.normal.dot(x) - f.offset) / f.normal.norm());
      return worst;
    }
    case Shape::ellipse:
      return ellipsoid_signed_distance(b_, x - a_);
    case Shape::stadium:
      return segment_distance(a_, b_, x) - radius_;
    case Shape::l_shape: {
      const double lo = a_[0], hi = b_[0], mid = 0.5 * (lo + hi);
      Coord bottom_hi(2), left_hi(2);
      bottom_hi << hi, mid;
      left_hi << mid, hi;
      return std::min(box_sd(a_, bottom_hi, x), box_sd(a_, left_hi, x));
    }
  }
  return 0.0;
}

std::string DomainSpec::describe() const {
  std::ostringstream os;
  os << to_string(shape_) << " dim=" << dim_;
  switch (shape_) {
    case Shape::ball: os << " center=" << coord_str(a_) << " radius=" << radius_; break;
    case Shape::box: os << " lo=" << coord_str(a_) << " hi=" << coord_str(b_); break;
    case Shape::halfspaces: os << " faces=" << faces_.size(); break;
    case Shape::ellipse: os << " center=" << coord_str(a_) << " semi_axes=" << coord_str(b_); break;
    case Shape::stadium:
      os << " a=" << coord_str(a_) << " b=" << coord_str(b_) << " radius=" << radius_;
      break;
    case Shape::l_shape: os << " lo=" << a_[0] << " hi=" << b_[0]; break;
  }
  return os.str();
}

double ellipsoid_signed_distance(const Coord& semi_axes, const Coord& y_in) {
  const int n = static_cast<int>(semi_axes.size());
  // Reflect into the first orthant; the closest point shares the signs of y.
  const Coord y = y_in.cwiseAbs();
  const Eigen::ArrayXd a = semi_axes.array();
  const double level = (y.array() / a).square().sum() - 1.0;

  // Closest point x_i = a_i^2 y_i / (a_i^2 + t), with t the root of
  // f(t) = sum (a_i y_i / (a_i^2 + t))^2 = 1 on (-a_min^2, inf).
  int smallest = 0;
  for (int i = 1; i < n; ++i) {
    if (a[i] < a[smallest]) smallest = i;
  }
  const double amin2 = a[smallest] * a[smallest];
  auto f = [&](double t) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      if (y[i] > 0.0) {
        const double r = a[i] * y[i] / (a[i] * a[i] + t);
        s += r * r;
      }
    }
    return s;
  };

  Coord x(n);
  if (y[smallest] == 0.0) {
    // Possible medial-axis case: the closest point leaves the plane y_s = 0.
    bool blocked = false;
    for (int i = 0; i < n; ++i) {
      if (i != smallest && y[i] > 0.0 && a[i] * a[i] == amin2) blocked = true;
    }
    if (!blocked) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        if (i == smallest) continue;
        x[i] = a[i] * a[i] * y[i] / (a[i] * a[i] - amin2);
        s += (x[i] / a[i]) * (x[i] / a[i]);
      }
      if (s < 1.0) {
        x[smallest] = a[smallest] * std::sqrt(1.0 - s);
        const double dist = (x - y).norm();
        return level < 0.0 ? -dist : dist;
      }
    }
  }

  double t_lo = -amin2;
  double t_hi = std::max(a.maxCoeff() * y.norm(), 0.0) + 1e-300;
  if (f(t_hi) > 1.0) t_hi = 2.0 * t_hi + 1.0;
  for (int it = 0; it < 400; ++it) {
    const double t = 0.5 * (t_lo + t_hi);
    if (t == t_lo || t == t_hi) break;
    (f(t) > 1.0 ? t_lo : t_hi) = t;
  }
  const double t = 0.5 * (t_lo + t_hi);
  for (int i = 0; i < n; ++i) x[i] = a[i] * a[i] * y[i] / (a[i] * a[i] + t);
  const double dist = (x - y).norm();
  return level < 0.0 ? -dist : dist;
}

}  // namespace dplap
