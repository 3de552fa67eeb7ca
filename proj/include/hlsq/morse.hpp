#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hlsq/numerics.hpp"
#include "hlsq/problem.hpp"

namespace hlsq {

struct CriticalPoint {
  ParameterVector location;
  double value = 0.0;
  double grad_norm = 0.0;
  int index_gamma = 0;  // negative Hessian eigenvalues
  bool degenerate = false;
  EigenSummary eigen;
};

struct CriticalPointSearch {
  std::vector<CriticalPoint> points;  // sorted lexicographically by location
  int seeds = 0;
  int dropped = 0;  // seeds that did not converge or left the box
  double critical_tol = 0.0;
  double merge_radius = 0.0;
};

/// Newton on the gradient from every node of an interior seed grid
/// (seed_density nodes per axis, strictly inside the box). Near-singular
/// Hessians fall back to a gradient step of length
/// min(1e-2 * box diagonal, |grad| / max |lambda|). Converged points are merged
/// within 1e-5 * max(1, |p|) and classified by eigen_index.
/// Default critical_tol: 1e-8 * max(1, median seed gradient norm).
CriticalPointSearch find_critical_points(const MeritFunction& merit, const DomainBox& box,
                                         int seed_density = 9,
                                         std::optional<double> critical_tol = std::nullopt);

struct OutwardCheck {
  bool outward = false;
  int sampled = 0;
  std::optional<ParameterVector> violation;  // first boundary point with grad . n <= 0
};

/// Samples each face of the box on a cell-centred grid of boundary_density
/// points per face axis (edges and corners, where the normal is undefined, are
/// not sampled) and checks grad F . n > 0 for the outward normal n.
OutwardCheck check_outward_gradient(const MeritFunction& merit, const DomainBox& box,
                                    int boundary_density);

struct MorseCensus {
  std::map<int, int> counts;  // index -> number of critical points
  bool boundary_outward = false;
  int alternating_sum = 0;
  bool pass = false;
  std::string diagnosis;
};

/// sum_k (-1)^k counts[k]; passes iff the boundary gradient is outward and the
/// sum is 1. Throws DegeneracyError listing any degenerate point.
MorseCensus morse_equality_audit(const std::vector<CriticalPoint>& points, bool outward);

}  // namespace hlsq
