#pragma once

#include <cmath>
#include <memory>
#include <random>

#include "dplap/domain.hpp"
#include "dplap/grid.hpp"
#include "dplap/sym_matrix.hpp"

namespace dplap::testing {

inline std::shared_ptr<const Grid> grid_for(const DomainSpec& d, double h) {
  return std::make_shared<const Grid>(build_grid(d, h));
}

inline Coord point(std::initializer_list<double> xs) {
  Coord c(static_cast<Eigen::Index>(xs.size()));
  int k = 0;
  for (double x : xs) c[k++] = x;
  return c;
}

inline DomainSpec unit_ball(int n = 2) { return DomainSpec::ball(Coord::Zero(n), 1.0); }
inline DomainSpec unit_box(int n = 2) { return DomainSpec::box(Coord::Zero(n), Coord::Ones(n)); }

// Hand-rolled generators for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  SymMatrix symmetric(int n, double scale = 1.0) {
    SmallMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) m(i, j) = uniform(-scale, scale);
    }
    return SymMatrix(m);
  }

  // B B^T + shift I with a random condition number up to about 1e3.
  SymMatrix spd(int n) {
    SmallMatrix b(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) b(i, j) = uniform(-1.0, 1.0);
    }
    const double shift = std::pow(10.0, uniform(-3.0, 0.0));
    return SymMatrix(SmallMatrix(b * b.transpose() + shift * SmallMatrix::Identity(n, n)));
  }

  Coord unit_vector(int n) {
    Coord q(n);
    do {
      for (int k = 0; k < n; ++k) q[k] = std::normal_distribution<double>()(rng_);
    } while (q.norm() < 1e-8);
    return q / q.norm();
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace dplap::testing
