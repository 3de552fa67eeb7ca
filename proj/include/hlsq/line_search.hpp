#pragma once

#include <functional>
#include <vector>

#include "hlsq/errors.hpp"
#include "hlsq/problem.hpp"

namespace hlsq {

using ScalarFunction = std::function<double(double)>;

/// a < b < c with fb < fa and fb < fc.
struct BracketTriplet {
  double a = 0.0, b = 0.0, c = 0.0;
  double fa = 0.0, fb = 0.0, fc = 0.0;

  bool certified() const { return a < b && b < c && fb < fa && fb < fc; }
};

class BracketError : public Error {
 public:
  enum class Kind {
    boundary,  // an endpoint of the grid holds the smallest value
    flat,      // all values equal within 1e-12
    plateau    // an interior minimum exists but is shared by neighbouring nodes
  };
  BracketError(const std::string& what, Kind kind, double location)
      : Error(what), kind_(kind), location_(location) {}
  Kind kind() const { return kind_; }
  /// Abscissa of the smallest grid value.
  double location() const { return location_; }

 private:
  Kind kind_;
  double location_;
};

/// First consecutive grid triplet whose middle value is strictly smallest,
/// scanning left to right. Grid values are evaluated lazily.
BracketTriplet bracket_on_grid(const ScalarFunction& f, const std::vector<double>& grid);

struct LineMinimum {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section contraction of a certified triplet until c - a <= x_tol.
/// Throws NonFiniteError naming the abscissa if f returns NaN or infinity.
LineMinimum golden_refine(const ScalarFunction& f, const BracketTriplet& triplet, double x_tol);

/// `count` evenly spaced nodes from lo to hi inclusive.
std::vector<double> uniform_grid(double lo, double hi, int count);

/// bracket_on_grid, retrying with a refined grid (midpoints inserted around the
/// smallest node) when the minimum sits on a two-node plateau. Throws the last
/// BracketError after `refinements` attempts.
BracketTriplet bracket_with_refinement(const ScalarFunction& f, std::vector<double> grid,
                                       int refinements = 4);

struct CoordinateSearchResult {
  Vector x;
  double value = 0.0;
  int cycles = 0;
  std::vector<int> evaluations_per_coordinate;
  std::vector<BracketTriplet> brackets;
};

/// Cyclic coordinate search: one bracketed golden line search per coordinate
/// and cycle. The first cycle brackets on the axis grids; later cycles
/// bracket locally around the current iterate, expanding within the grid
/// bounds. Stops once the cycle step (infinity norm), inflated by the observed
/// contraction rate r as step * max(1, r / (1 - r)), is at most x_tol.
CoordinateSearchResult cyclic_coordinate_search(const std::function<double(const Vector&)>& f,
                                                const std::vector<std::vector<double>>& axis_grids,
                                                double x_tol, int max_cycles = 1000);

}  // namespace hlsq
