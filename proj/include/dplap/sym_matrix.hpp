#pragma once

#include <Eigen/Core>

#include "dplap/domain.hpp"

namespace dplap {

using SmallMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

/// Dense symmetric n x n matrix, n <= 3. Symmetry is enforced on
/// construction by averaging with the transpose.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const SmallMatrix& m);

  static SymMatrix identity(int n);
  static SymMatrix diagonal(const Coord& d);

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }
  const SmallMatrix& matrix() const noexcept { return m_; }

  double trace() const { return m_.trace(); }
  /// Ascending eigenvalues.
  Coord eigenvalues() const;
  double lambda_max() const;
  double lambda_min() const;
  /// <q, X q>.
  double quadratic_form(const Coord& q) const { return q.dot(m_ * q); }

  SymMatrix inverse() const;
  bool positive_definite() const { return dim() > 0 && lambda_min() > 0.0; }

  SymMatrix operator*(double c) const { return SymMatrix(m_ * c); }
  SymMatrix operator+(const SymMatrix& o) const { return SymMatrix(m_ + o.m_); }

 private:
  SmallMatrix m_;
};

/// D_p(X) = tr(X) + (p - 2) lambda_max(X). Requires p >= 2.
double dp_matrix(const SymMatrix& x, double p);

}  // namespace dplap
