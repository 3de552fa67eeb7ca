#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace hlsq {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on caller-supplied data does not hold (bad input).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The y-Hessian of a slice is not positive definite: the convexity-in-y
/// hypothesis that makes the hierarchical solve equivalent to the direct one
/// has failed. Carries the offending point and the y-block eigenvalue there.
class ConvexityViolation : public Error {
 public:
  ConvexityViolation(const std::string& what, Eigen::VectorXd witness, double min_eigenvalue)
      : Error(what), witness_(std::move(witness)), min_eigenvalue_(min_eigenvalue) {}

  const Eigen::VectorXd& witness() const { return witness_; }
  double min_eigenvalue() const { return min_eigenvalue_; }

 private:
  Eigen::VectorXd witness_;
  double min_eigenvalue_;
};

/// An iterative method stopped before meeting its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, Eigen::VectorXd best, double gradient_norm)
      : Error(what), best_(std::move(best)), gradient_norm_(gradient_norm) {}

  const Eigen::VectorXd& best_iterate() const { return best_; }
  double gradient_norm() const { return gradient_norm_; }

 private:
  Eigen::VectorXd best_;
  double gradient_norm_;
};

class RankDeficientError : public Error {
 public:
  RankDeficientError(const std::string& what, int rank) : Error(what), rank_(rank) {}
  int rank() const { return rank_; }

 private:
  int rank_;
};

/// A derivative stencil or a section evaluation produced NaN or infinity.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// The implicit function could not be continued through a grid point.
class TraceError : public Error {
 public:
  TraceError(const std::string& what, Eigen::VectorXd failing_x)
      : Error(what), failing_x_(std::move(failing_x)) {}
  const Eigen::VectorXd& failing_x() const { return failing_x_; }

 private:
  Eigen::VectorXd failing_x_;
};

/// A degenerate critical point makes the Morse count undefined.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

}  // namespace hlsq
