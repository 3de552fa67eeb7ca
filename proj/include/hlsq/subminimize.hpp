#pragma once

#include <optional>

#include "hlsq/problem.hpp"

namespace hlsq {

/// The slice function F^x(y) = F(x_fixed, y).
struct SliceProblem {
  MeritFunction merit;
  ParameterSplit split;
  Vector x_fixed;
};

enum class SubMethod { linear_elimination, newton };

const char* to_string(SubMethod m);

/// Conditional minimum of F over y at fixed x.
struct SubMinimum {
  Vector y_star;
  double value = 0.0;
  double grad_y_norm = 0.0;
  double y_hessian_min_eig = 0.0;
  int y_negative_count = 0;  // Morse index of the slice at y_star
  SubMethod method = SubMethod::newton;
  int iterations = 0;
  double inner_tol = 0.0;
};

enum class ConvexityVerdict { positive_definite_everywhere_sampled, violated };

struct ConvexityCertificate {
  std::optional<ParameterSplit> split;  // empty for a full-Hessian probe
  int grid_density = 0;
  long sampled_points = 0;
  double min_eig_over_samples = 0.0;
  ConvexityVerdict verdict = ConvexityVerdict::violated;
  std::optional<ParameterVector> witness;  // set iff violated
  double witness_eig = 0.0;

  bool positive() const { return verdict == ConvexityVerdict::positive_definite_everywhere_sampled; }
};

/// 21 points per axis for M <= 4, 7 for M <= 8, 3 beyond.
int default_probe_density(int dimension);

/// Samples the minimum eigenvalue of F''_yy on a full uniform grid over the
/// domain box (grid nodes include the box faces). Partially linear models
/// with their natural split are sampled once per x node, since F''_yy does
/// not depend on y there.
ConvexityCertificate probe_y_convexity(const MeritFunction& merit, const ParameterSplit& split,
                                       std::optional<int> grid_density = std::nullopt);

/// Same grid probe on the full Hessian (strict convexity on the box).
ConvexityCertificate probe_full_convexity(const MeritFunction& merit,
                                          std::optional<int> grid_density = std::nullopt);

/// Throws ConvexityViolation carrying the witness when the certificate is not positive.
void require_positive(const ConvexityCertificate& certificate);

/// Exact elimination of the linear parameters of a partially linear model.
/// Requires the model's natural split.
SubMinimum subminimize_linear(const SliceProblem& problem);

/// 1e-10 * max(1, F(x, y0)).
double default_inner_tol(const SliceProblem& problem, const Vector& y0);

/// Damped Newton on F^x with Armijo backtracking (c = 1e-4, at most 40 halvings).
/// Iterates are kept inside the y-projection of the box.
/// Throws ConvexityViolation when an iterate's y-Hessian is not positive
/// definite and ConvergenceError after max_iter iterations or a failed line search.
SubMinimum subminimize_newton(const SliceProblem& problem, const Vector& y0,
                              std::optional<double> inner_tol = std::nullopt, int max_iter = 100);

/// Linear elimination when the model allows it, Newton from `warm` (or the
/// centre of the y box) otherwise.
SubMinimum subminimize(const SliceProblem& problem, const std::optional<Vector>& warm = std::nullopt,
                       std::optional<double> inner_tol = std::nullopt);

/// True when subminimize() would use linear elimination for this split.
bool supports_linear_elimination(const MeritFunction& merit, const ParameterSplit& split);

}  // namespace hlsq
