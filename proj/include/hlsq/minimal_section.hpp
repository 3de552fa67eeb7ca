#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "hlsq/line_search.hpp"
#include "hlsq/problem.hpp"
#include "hlsq/subminimize.hpp"

namespace hlsq {

struct TraceOptions {
  std::optional<double> inner_tol;  // default: relative, see default_inner_tol
  /// A certificate for the split; when absent the y-convexity probe runs first.
  std::optional<ConvexityCertificate> certificate;
  std::optional<int> probe_density;
};

/// The minimal section x -> F[x, g(x)] evaluated on demand. Each evaluation is
/// one slice solve, warm-started from the previous solution.
class SectionEvaluator {
 public:
  SectionEvaluator(MeritFunction merit, ParameterSplit split, std::optional<double> inner_tol = std::nullopt);

  SubMinimum solve(const Vector& x);
  double value(const Vector& x) { return solve(x).value; }
  double value(double x) { return value(Vector::Constant(1, x)); }

  int inner_solves() const { return solves_; }
  const ParameterSplit& split() const { return split_; }
  const MeritFunction& merit() const { return merit_; }

 private:
  MeritFunction merit_;
  ParameterSplit split_;
  std::optional<double> inner_tol_;
  std::optional<Vector> last_y_;
  int solves_ = 0;
};

/// Sampled graph of y = g(x) with the zero-derivative certificate of each point.
struct ImplicitTrace {
  ParameterSplit split;
  std::vector<Vector> x_samples;
  std::vector<Vector> g_values;
  std::vector<double> values;          // F[x, g(x)]
  std::vector<double> residual_norms;  // ||F'_y(x, g(x))||
  std::vector<double> inner_tols;
  std::vector<int> y_index_along_trace;
  ConvexityCertificate certificate;
};

/// Solves the slice problem at every grid point. Newton slices are continued
/// left to right and then right to left; each point keeps the pass with the
/// smaller residual. Throws ConvexityViolation when the split is not
/// certified and TraceError naming the x where no pass succeeded.
ImplicitTrace trace_implicit(const MeritFunction& merit, const ParameterSplit& split,
                             const std::vector<Vector>& x_grid, const TraceOptions& options = {});

struct SectionMinimum {
  std::size_t grid_index = 0;
  bool plateau = false;  // a neighbour has the same value; not polished
  double x = 0.0;
  double value = 0.0;
  Vector companions;
};

/// One-parameter minimal section: every other coordinate eliminated.
struct MinimalSection1D {
  int parameter_index = 0;
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<Vector> companions;  // remaining coordinates in increasing index order
  std::vector<double> residuals;
  std::vector<SectionMinimum> local_minima;
  std::shared_ptr<SectionEvaluator> evaluator;

  double evaluate(double u) const { return evaluator->value(u); }
};

/// Plateau tolerance used when comparing neighbouring section values.
inline double section_tie_tol(double v) { return 1e-12 * std::max(1.0, std::abs(v)); }

/// Golden-section polish tolerance for section minima.
inline constexpr double kPolishTol = 1e-10;

MinimalSection1D minimal_section_1d(const MeritFunction& merit, int parameter_index,
                                    const std::vector<double>& grid, const TraceOptions& options = {});

/// Projection [lo, hi] of the sub-level set {F <= z} onto the section's axis.
struct SubLevelInterval {
  int parameter_index = 0;
  double level_z = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

inline constexpr double kRootTol = 1e-13;

/// Crossings of level z on either side of the section minimum, by bisection on
/// the continuous section. Throws InvalidArgument when z is below the minimum,
/// when the section has several minima or a plateau, or when the grid does not
/// reach level z on one side.
SubLevelInterval sublevel_interval(const MinimalSection1D& section, double level_z);

/// Per companion coordinate: strictly monotone along the grid (injective).
std::vector<bool> companion_injectivity(const MinimalSection1D& section);

struct NestingPoint {
  Vector inner_x;
  double direct = 0.0;    // min over everything outside x'
  double iterated = 0.0;  // min over (x \ x') of the minimal section of x
};

struct NestingReport {
  std::vector<int> outer_x;
  std::vector<int> inner_x;
  std::vector<NestingPoint> points;
  double max_abs_difference = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Compares iterated minimization through the minimal section of outer_split.x
/// with the direct minimal section of inner_x, pointwise on a uniform grid of
/// `grid_points` nodes per inner axis. Throws ConvexityViolation unless the full
/// Hessian probe certifies strict convexity, InvalidArgument unless inner_x is
/// a non-empty proper subset of outer_split.x_indices().
NestingReport nesting_check(const MeritFunction& merit, const ParameterSplit& outer_split,
                            const std::vector<int>& inner_x, int grid_points = 21,
                            double tolerance = 1e-6);

}  // namespace hlsq
