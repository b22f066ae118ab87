#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace dplap {

/// Point or vector in R^n, n <= 3, stored inline.
using Coord = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;

enum class Shape { ball, box, halfspaces, ellipse, stadium, l_shape };

std::string to_string(Shape shape);
Shape shape_from_string(const std::string& name);

/// Closed halfspace {x : <normal, x> <= offset}.
struct Halfspace {
  Coord normal;
  double offset = 0.0;
};

/// A bounded region of R^n (n = 1, 2, 3) described through its signed
/// distance function.
///
/// All shapes except the L-shape are convex. The L-shape exists as a negative
/// control for the concavity checks: it is the square [lo, hi]^2 with the
/// upper-right quarter removed.
class DomainSpec {
 public:
  static DomainSpec ball(const Coord& center, double radius);
  static DomainSpec box(const Coord& lo, const Coord& hi);
  static DomainSpec interval(double lo, double hi);
  static DomainSpec halfspace_intersection(std::vector<Halfspace> faces);
  static DomainSpec ellipse(const Coord& center, const Coord& semi_axes);
  static DomainSpec stadium(const Coord& a, const Coord& b, double radius);
  static DomainSpec l_shape(double lo, double hi);

  Shape shape() const noexcept { return shape_; }
  int dim() const noexcept { return dim_; }
  bool convex() const noexcept { return shape_ != Shape::l_shape; }
  /// Whether every boundary point is touched by an interior ball.
  bool interior_sphere() const noexcept;

  /// Negative strictly inside, zero on the boundary, positive outside.
  ///
  /// Exact for ball, box, ellipse and stadium. For halfspace intersections and
  /// the L-shape the magnitude outside (resp. inside) is a lower bound.
  double signed_distance(const Coord& x) const;
  bool contains(const Coord& x) const { return signed_distance(x) < 0.0; }

  /// Axis-aligned bounding box of the closed domain.
  Coord bbox_lo() const { return bbox_lo_; }
  Coord bbox_hi() const { return bbox_hi_; }

  // Shape parameters, meaningful for the matching shape only.
  const Coord& center() const noexcept { return a_; }
  double radius() const noexcept { return radius_; }
  const Coord& lo() const noexcept { return a_; }
  const Coord& hi() const noexcept { return b_; }
  const Coord& semi_axes() const noexcept { return b_; }
  const Coord& segment_a() const noexcept { return a_; }
  const Coord& segment_b() const noexcept { return b_; }
  const std::vector<Halfspace>& faces() const noexcept { return faces_; }

  std::string describe() const;

 private:
  DomainSpec(Shape shape, int dim) : shape_(shape), dim_(dim) {}

  Shape shape_;
  int dim_;
  Coord a_;
  Coord b_;
  double radius_ = 0.0;
  std::vector<Halfspace> faces_;
  Coord bbox_lo_;
  Coord bbox_hi_;
};

/// Free-function form of DomainSpec::signed_distance.
inline double signed_distance(const DomainSpec& domain, const Coord& x) {
  return domain.signed_distance(x);
}

/// Distance from y to the ellipsoid sum (x_i / a_i)^2 = 1, signed negative
/// inside.
double ellipsoid_signed_distance(const Coord& semi_axes, const Coord& y);

}  // namespace dplap
