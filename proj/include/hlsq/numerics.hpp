#pragma once

#include <optional>
#include <vector>

#include "hlsq/problem.hpp"

namespace hlsq {

/// Central-difference gradient. Coordinates closer to the box boundary than
/// their step fall back to second-order one-sided stencils and set one_sided.
struct FdGradient {
  Vector values;
  Vector steps;
  bool one_sided = false;
};

/// Step h_i = cbrt(eps) * max(1, |p_i|).
FdGradient fd_gradient(const MeritFunction& merit, const Vector& p);

/// Partial gradient over a subset of coordinates, in the order given.
FdGradient fd_gradient(const MeritFunction& merit, const Vector& p, const std::vector<int>& indices);

struct FdHessian {
  Matrix values;  // symmetrized
  Vector steps;
  double raw_asymmetry = 0.0;  // max |H_ij - H_ji| / max(1, max |H|) before symmetrization
  bool one_sided = false;
};

/// Hessian restricted to the given coordinates. Step h_i = eps^(1/4) * max(1, |p_i|).
/// Throws NonFiniteError naming the coordinate pair when a stencil is not finite.
FdHessian fd_hessian_block(const MeritFunction& merit, const Vector& p,
                           const std::vector<int>& indices);

struct DerivativeReport {
  Vector gradient;
  Matrix hessian;  // symmetrized
  Matrix y_block;  // hessian restricted to split.y_indices; empty without a split
  Vector fd_step;  // Hessian steps
  double raw_asymmetry = 0.0;
  bool asymmetry_flagged = false;  // raw_asymmetry above 1e-4
  bool one_sided = false;
};

inline constexpr double kAsymmetryWarning = 1e-4;

DerivativeReport fd_hessian(const MeritFunction& merit, const Vector& p,
                            const std::optional<ParameterSplit>& split = std::nullopt);

struct EigenSummary {
  Vector eigenvalues;  // ascending
  double min_abs = 0.0;
  int negative_count = 0;
  int near_zero_count = 0;
  int positive_count = 0;
  double degeneracy_tol = 0.0;

  int size() const { return static_cast<int>(eigenvalues.size()); }
};

/// Default degeneracy tolerance: 1e-6 * max(1, max |lambda|).
/// Eigenvalues with |lambda| <= tol count as near zero, never as negative.
/// Throws InvalidArgument for a non-symmetric or empty input.
EigenSummary eigen_index(const Matrix& h, std::optional<double> degeneracy_tol = std::nullopt);

/// min eigenvalue > tol, default tol = 1e-8 * max(1, ||H||_2).
bool is_positive_definite(const Matrix& h, std::optional<double> tol = std::nullopt);

/// Least-squares solution of A y = b via column-pivoted Householder QR.
/// Throws RankDeficientError (carrying the numerical rank) when A has
/// dependent columns, InvalidArgument when rows < columns.
Vector linear_lsq_solve(const Matrix& a, const Vector& b);

}  // namespace hlsq
