#include "hlsq/line_search.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hlsq {

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;  // 0.618...

bool all_equal(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo <= 1e-12 * std::max(1.0, std::abs(*lo));
}

}  // namespace

std::vector<double> uniform_grid(double lo, double hi, int count) {
  if (count < 2 || !(lo < hi)) throw InvalidArgument("uniform grid needs count >= 2 and lo < hi");
  std::vector<double> grid(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) grid[static_cast<std::size_t>(j)] = lo + (hi - lo) * j / (count - 1);
  grid.back() = hi;
  return grid;
}

BracketTriplet bracket_on_grid(const ScalarFunction& f, const std::vector<double>& grid) {
  if (grid.size() < 3) throw InvalidArgument("bracketing needs at least 3 grid points");
  for (std::size_t j = 1; j < grid.size(); ++j) {
    if (!(grid[j - 1] < grid[j])) throw InvalidArgument("bracketing grid must be strictly increasing");
  }
  std::vector<double> values;
  values.reserve(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    values.push_back(f(grid[j]));
    if (j >= 2 && values[j - 1] < values[j - 2] && values[j - 1] < values[j]) {
      return {grid[j - 2], grid[j - 1], grid[j], values[j - 2], values[j - 1], values[j]};
    }
  }

  const auto smallest = static_cast<std::size_t>(
      std::distance(values.begin(), std::min_element(values.begin(), values.end())));
  std::ostringstream os;
  if (all_equal(values)) {
    os << "no bracket: function is flat over the grid";
    throw BracketError(os.str(), BracketError::Kind::flat, grid[smallest]);
  }
  if (smallest == 0 || smallest + 1 == grid.size()) {
    os << "no bracket: minimum at boundary x = " << grid[smallest];
    throw BracketError(os.str(), BracketError::Kind::boundary, grid[smallest]);
  }
  os << "no strict bracket: minimum shared by neighbouring nodes near x = " << grid[smallest];
  throw BracketError(os.str(), BracketError::Kind::plateau, grid[smallest]);
}

BracketTriplet bracket_with_refinement(const ScalarFunction& f, std::vector<double> grid,
                                       int refinements) {
  for (int attempt = 0;; ++attempt) {
    try {
      return bracket_on_grid(f, grid);
    } catch (const BracketError& e) {
      if (e.kind() != BracketError::Kind::plateau || attempt >= refinements) throw;
      const auto it = std::lower_bound(grid.begin(), grid.end(), e.location());
      const auto j = static_cast<std::size_t>(std::distance(grid.begin(), it));
      std::vector<double> extra;
      for (std::size_t k = (j >= 2 ? j - 2 : 0); k + 1 < grid.size() && k <= j + 1; ++k) {
        extra.push_back(0.5 * (grid[k] + grid[k + 1]));
      }
      grid.insert(grid.end(), extra.begin(), extra.end());
      std::sort(grid.begin(), grid.end());
    }
  }
}

LineMinimum golden_refine(const ScalarFunction& f, const BracketTriplet& triplet, double x_tol) {
  if (!triplet.certified()) throw InvalidArgument("golden_refine needs a certified bracket triplet");
  LineMinimum out;
  auto eval = [&](double u) {
    const double v = f(u);
    ++out.evaluations;
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os.precision(17);
      os << "section evaluation is not finite at x = " << u;
      throw NonFiniteError(os.str());
    }
    return v;
  };

  const double c_frac = 1.0 - kGolden;
  double x0 = triplet.a;
  double x3 = triplet.c;
  double x1 = 0.0;
  double x2 = 0.0;
  double f1 = 0.0;
  double f2 = 0.0;
  if (triplet.c - triplet.b > triplet.b - triplet.a) {
    x1 = triplet.b;
    f1 = triplet.fb;
    x2 = triplet.b + c_frac * (triplet.c - triplet.b);
    f2 = eval(x2);
  } else {
    x2 = triplet.b;
    f2 = triplet.fb;
    x1 = triplet.b - c_frac * (triplet.b - triplet.a);
    f1 = eval(x1);
  }
  while (x3 - x0 > x_tol) {
    if (f2 < f1) {
      x0 = x1;
      x1 = x2;
      x2 = kGolden * x2 + c_frac * x3;
      f1 = f2;
      f2 = eval(x2);
    } else {
      x3 = x2;
      x2 = x1;
      x1 = kGolden * x1 + c_frac * x0;
      f2 = f1;
      f1 = eval(x1);
    }
    // Spacing has collapsed below representable resolution.
    if (!(x1 < x2)) break;
  }
  if (f1 < f2) {
    out.x = x1;
    out.value = f1;
  } else {
    out.x = x2;
    out.value = f2;
  }
  return out;
}

CoordinateSearchResult cyclic_coordinate_search(const std::function<double(const Vector&)>& f,
                                                const std::vector<std::vector<double>>& axis_grids,
                                                double x_tol, int max_cycles) {
  const auto n = static_cast<Eigen::Index>(axis_grids.size());
  if (n == 0) throw InvalidArgument("coordinate search needs at least one axis");
  CoordinateSearchResult result;
  result.evaluations_per_coordinate.assign(axis_grids.size(), 0);
  const double line_tol = 1e-2 * x_tol;

  Vector x(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& g = axis_grids[static_cast<std::size_t>(k)];
    x[k] = g[g.size() / 2];
  }
  double fx = 0.0;
  double previous_step = 0.0;

  for (int cycle = 0; cycle < max_cycles; ++cycle) {
    const Vector start = x;
    for (Eigen::Index k = 0; k < n; ++k) {
      const auto& grid = axis_grids[static_cast<std::size_t>(k)];
      int& counter = result.evaluations_per_coordinate[static_cast<std::size_t>(k)];
      ScalarFunction line = [&](double u) {
        Vector q = x;
        q[k] = u;
        ++counter;
        return f(q);
      };

      BracketTriplet triplet;
      bool have_triplet = false;
      if (cycle > 0) {
        // Local downhill bracketing around the current coordinate.
        const double lo = grid.front();
        const double hi = grid.back();
        double c = x[k];
        double fc = fx;
        double w = std::max(2.0 * previous_step, x_tol);
        while (w <= hi - lo) {
          const double a = std::max(lo, c - w);
          const double b = std::min(hi, c + w);
          if (!(a < c && c < b)) break;
          const double fa = line(a);
          const double fb = line(b);
          if (fc < fa && fc < fb) {
            triplet = {a, c, b, fa, fc, fb};
            have_triplet = true;
            break;
          }
          if (fa < fc && fa <= fb) {
            c = a;
            fc = fa;
          } else if (fb < fc) {
            c = b;
            fc = fb;
          }
          w *= 2.0;
        }
      }
      if (!have_triplet) triplet = bracket_with_refinement(line, grid);
      result.brackets.push_back(triplet);
      const LineMinimum lm = golden_refine(line, triplet, line_tol);
      x[k] = lm.x;
      fx = lm.value;
    }
    ++result.cycles;
    const double step = (x - start).lpNorm<Eigen::Infinity>();
    if (n == 1 || step == 0.0) break;
    if (cycle > 0) {
      const double rate = previous_step > 0.0 ? std::min(step / previous_step, 0.999) : 0.0;
      if (step * std::max(1.0, rate / (1.0 - rate)) <= x_tol) break;
    }
    previous_step = step;
    if (cycle + 1 == max_cycles) {
      throw ConvergenceError("cyclic coordinate search did not converge in " +
                                 std::to_string(max_cycles) + " cycles",
                             x, step);
    }
  }
  result.x = x;
  result.value = fx;
  return result;
}

}  // namespace hlsq
