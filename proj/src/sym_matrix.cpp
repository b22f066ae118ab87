#include "dplap/sym_matrix.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "dplap/error.hpp"

namespace dplap {

SymMatrix::SymMatrix(const SmallMatrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1 || m.rows() > 3) {
    throw InvalidArgument("SymMatrix must be square with dimension 1..3");
  }
  if (!m.allFinite()) throw InvalidArgument("SymMatrix entries must be finite");
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(int n) { return SymMatrix(SmallMatrix::Identity(n, n)); }

SymMatrix SymMatrix::diagonal(const Coord& d) {
  return SymMatrix(SmallMatrix(d.asDiagonal()));
}

Coord SymMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<SmallMatrix> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double SymMatrix::lambda_max() const { return eigenvalues().maxCoeff(); }
double SymMatrix::lambda_min() const { return eigenvalues().minCoeff(); }

SymMatrix SymMatrix::inverse() const {
  Eigen::FullPivLU<SmallMatrix> lu(m_);
  if (!lu.isInvertible()) throw InvalidArgument("matrix is singular");
  return SymMatrix(lu.inverse());
}

double dp_matrix(const SymMatrix& x, double p) {
  if (!(p >= 2.0)) throw InvalidArgument("p must be >= 2");
  return x.trace() + (p - 2.0) * x.lambda_max();
}

}  // namespace dplap
