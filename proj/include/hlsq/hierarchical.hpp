#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hlsq/line_search.hpp"
#include "hlsq/minimal_section.hpp"
#include "hlsq/problem.hpp"
#include "hlsq/subminimize.hpp"

namespace hlsq {

struct Tolerances {
  std::optional<double> inner_tol;  // slice certificate; default relative to F
  double outer_tol = 1e-6;          // gradient norm at the returned minimizer
  std::optional<double> x_tol;      // default 1e-8 * widest searched box side
};

struct HierarchicalOptions {
  Tolerances tolerances;
  int grid_density = 21;  // bracketing grid nodes per x axis
  std::optional<ConvexityCertificate> certificate;
  std::optional<int> probe_density;
};

enum class SolveMethod { hierarchical, direct };

const char* to_string(SolveMethod m);

struct SolveReport {
  ParameterVector minimizer;
  double value = 0.0;
  SolveMethod method = SolveMethod::direct;
  int inner_solves = 0;
  /// Section evaluations requested by the outer search, the final solve included.
  int outer_evaluations = 0;
  /// Outer evaluations attributed to each coordinate; zero for eliminated ones.
  std::vector<int> outer_evaluations_by_coordinate;
  int iterations = 0;  // Newton iterations (direct) or coordinate cycles (hierarchical)
  double gradient_norm = 0.0;
  std::optional<ConvexityCertificate> convexity;
  std::vector<BracketTriplet> brackets;
  std::optional<ParameterSplit> split;
};

/// Minimizes the minimal section of `split`: bracketing on the axis grid and
/// golden-section refinement for one x coordinate, cyclic coordinate search
/// over section restrictions otherwise. Refuses with ConvexityViolation when
/// the y-convexity certificate is violated. Throws ConvergenceError if the
/// gradient norm of F at the result exceeds outer_tol.
SolveReport solve_hierarchical(const MeritFunction& merit, const ParameterSplit& split,
                               const HierarchicalOptions& options = {});

/// Baseline: damped Newton on the full FD gradient. Negative and tiny Hessian
/// eigenvalues are replaced by their floored absolute values so every step is
/// a descent direction.
SolveReport solve_direct(const MeritFunction& merit, const ParameterVector& p0,
                         const Tolerances& tolerances = {}, int max_iter = 200);

struct DirectOutcome {
  ParameterVector start;
  std::optional<SolveReport> report;
  std::string error;  // set when the direct solve did not converge
  double distance = 0.0;
  double value_gap = 0.0;
};

struct EquivalenceReport {
  SolveReport hierarchical;
  /// Hierarchical answers: the solve itself plus, for a single x coordinate,
  /// every polished strict minimum of the minimal section on the grid.
  std::vector<ParameterVector> candidates;
  std::vector<DirectOutcome> direct;
  int converged = 0;
  double max_distance = 0.0;   // infinity norm to the nearest candidate
  double max_value_gap = 0.0;  // |F(direct) - F(nearest candidate)|
};

EquivalenceReport equivalence_report(const MeritFunction& merit, const ParameterSplit& split,
                                     const std::vector<ParameterVector>& starts,
                                     const HierarchicalOptions& options = {});

/// Uniform random points in the middle 80% of each box side.
std::vector<ParameterVector> random_starts(const DomainBox& box, int count, std::uint64_t seed);

struct RegularizationRecovery {
  int anchor_index = 0;
  double anchor_value = 0.0;
  ParameterVector recovered;
  double value = 0.0;
  double section_residual = 0.0;  // ||F'_y|| at recovered
  double inner_tol = 0.0;
};

/// One slice solve of the one-parameter implicit function at x_i = anchor_value.
RegularizationRecovery recover_from_anchor(const MeritFunction& merit, int anchor_index,
                                           double anchor_value, const TraceOptions& options = {});

}  // namespace hlsq
