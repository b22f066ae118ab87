#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dplap {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejected argument or violated precondition (p < 2, h <= 0, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The lattice has no interior point inside the domain.
class GridTooCoarse : public Error {
 public:
  GridTooCoarse() : Error("grid too coarse") {}
};

/// A stencil lost every admissible direction at some interior point.
class StencilStarved : public Error {
 public:
  explicit StencilStarved(const std::string& where) : Error("stencil starved at " + where) {}
};

/// An iteration hit its cap before reaching the requested tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}

  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

/// Malformed or invalid run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace dplap
