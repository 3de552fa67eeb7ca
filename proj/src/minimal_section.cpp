#include "hlsq/minimal_section.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hlsq/errors.hpp"

namespace hlsq {

namespace {

ConvexityCertificate certified(const MeritFunction& merit, const ParameterSplit& split,
                               const TraceOptions& options) {
  ConvexityCertificate cert = options.certificate && options.certificate->split == split
                                  ? *options.certificate
                                  : probe_y_convexity(merit, split, options.probe_density);
  require_positive(cert);
  return cert;
}

std::string describe(const Vector& x) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

}  // namespace

SectionEvaluator::SectionEvaluator(MeritFunction merit, ParameterSplit split,
                                   std::optional<double> inner_tol)
    : merit_(std::move(merit)), split_(std::move(split)), inner_tol_(inner_tol) {}

SubMinimum SectionEvaluator::solve(const Vector& x) {
  if (x.size() != split_.n()) throw InvalidArgument("section evaluated with the wrong x dimension");
  ++solves_;
  SubMinimum s = subminimize({merit_, split_, x}, last_y_, inner_tol_);
  last_y_ = s.y_star;
  return s;
}

ImplicitTrace trace_implicit(const MeritFunction& merit, const ParameterSplit& split,
                             const std::vector<Vector>& x_grid, const TraceOptions& options) {
  if (split.dimension() != merit.dimension()) {
    throw InvalidArgument("split dimension does not match the merit function");
  }
  ImplicitTrace trace{split, x_grid, {}, {}, {}, {}, {}, certified(merit, split, options)};
  const std::size_t count = x_grid.size();
  std::vector<std::optional<SubMinimum>> best(count);

  auto keep = [&](std::size_t j, SubMinimum s) {
    if (!best[j] || s.grad_y_norm < best[j]->grad_y_norm) best[j] = std::move(s);
  };

  if (supports_linear_elimination(merit, split)) {
    for (std::size_t j = 0; j < count; ++j) best[j] = subminimize_linear({merit, split, x_grid[j]});
  } else {
    const Vector center = merit.box().restrict_to(split.y_indices()).center();
    auto sweep = [&](bool forward) {
      std::optional<Vector> warm;
      for (std::size_t step = 0; step < count; ++step) {
        const std::size_t j = forward ? step : count - 1 - step;
        try {
          SubMinimum s = subminimize_newton({merit, split, x_grid[j]}, warm ? *warm : center,
                                            options.inner_tol);
          warm = s.y_star;
          keep(j, std::move(s));
        } catch (const ConvergenceError&) {
        } catch (const NonFiniteError&) {
        }
      }
    };
    sweep(true);
    sweep(false);
  }

  for (std::size_t j = 0; j < count; ++j) {
    if (!best[j]) {
      throw TraceError("implicit function could not be continued through x = " + describe(x_grid[j]),
                       x_grid[j]);
    }
    const SubMinimum& s = *best[j];
    trace.g_values.push_back(s.y_star);
    trace.values.push_back(s.value);
    trace.residual_norms.push_back(s.grad_y_norm);
    trace.inner_tols.push_back(s.inner_tol);
    trace.y_index_along_trace.push_back(s.y_negative_count);
  }
  return trace;
}

MinimalSection1D minimal_section_1d(const MeritFunction& merit, int parameter_index,
                                    const std::vector<double>& grid, const TraceOptions& options) {
  if (parameter_index < 0 || parameter_index >= merit.dimension()) {
    throw InvalidArgument("section parameter index out of range");
  }
  if (grid.size() < 3) throw InvalidArgument("a minimal section needs at least 3 grid points");
  const auto split = ParameterSplit::single(parameter_index, merit.dimension());
  std::vector<Vector> xs;
  xs.reserve(grid.size());
  for (double u : grid) xs.push_back(Vector::Constant(1, u));

  TraceOptions opts = options;
  const ImplicitTrace trace = trace_implicit(merit, split, xs, opts);

  MinimalSection1D section;
  section.parameter_index = parameter_index;
  section.grid = grid;
  section.values = trace.values;
  section.companions = trace.g_values;
  section.residuals = trace.residual_norms;
  section.evaluator = std::make_shared<SectionEvaluator>(merit, split, options.inner_tol);

  const auto& v = section.values;
  for (std::size_t j = 1; j + 1 < v.size(); ++j) {
    const double tol = section_tie_tol(v[j]);
    if (v[j] > v[j - 1] + tol || v[j] > v[j + 1] + tol) continue;
    SectionMinimum m;
    m.grid_index = j;
    m.plateau = std::abs(v[j] - v[j - 1]) <= tol || std::abs(v[j] - v[j + 1]) <= tol;
    m.x = grid[j];
    m.value = v[j];
    m.companions = section.companions[j];
    if (!m.plateau) {
      auto& eval = *section.evaluator;
      const BracketTriplet triplet{grid[j - 1], grid[j], grid[j + 1], v[j - 1], v[j], v[j + 1]};
      const LineMinimum lm = golden_refine([&](double u) { return eval.value(u); }, triplet, kPolishTol);
      const SubMinimum s = eval.solve(Vector::Constant(1, lm.x));
      m.x = lm.x;
      m.value = s.value;
      m.companions = s.y_star;
    }
    section.local_minima.push_back(std::move(m));
  }
  return section;
}

SubLevelInterval sublevel_interval(const MinimalSection1D& section, double level_z) {
  if (section.local_minima.size() != 1 || section.local_minima.front().plateau) {
    throw InvalidArgument("sub-level interval needs a section with a unique strict minimum; found " +
                          std::to_string(section.local_minima.size()) +
                          " grid minima, analyse each basin separately");
  }
  const SectionMinimum& m = section.local_minima.front();
  const double tol = section_tie_tol(m.value);
  if (level_z < m.value - tol) {
    std::ostringstream os;
    os.precision(17);
    os << "level z = " << level_z << " is below the section minimum " << m.value;
    throw InvalidArgument(os.str());
  }
  SubLevelInterval out{section.parameter_index, level_z, m.x, m.x};
  if (level_z <= m.value + tol) return out;

  // Bisection for the crossing between `outside` (value >= z) and `inside` (value < z).
  auto crossing = [&](double outside, double inside) {
    for (int it = 0; it < 200; ++it) {
      if (std::abs(outside - inside) <= kRootTol * std::max(1.0, std::abs(inside))) break;
      const double mid = 0.5 * (outside + inside);
      if (section.evaluate(mid) >= level_z) {
        outside = mid;
      } else {
        inside = mid;
      }
    }
    return 0.5 * (outside + inside);
  };

  const auto& g = section.grid;
  const auto& v = section.values;
  std::optional<std::size_t> left;
  for (std::size_t j = 0; j < g.size() && g[j] < m.x; ++j) {
    if (v[j] >= level_z) left = j;
  }
  std::optional<std::size_t> right;
  for (std::size_t j = g.size(); j-- > 0 && g[j] > m.x;) {
    if (v[j] >= level_z) right = j;
  }
  if (!left || !right) {
    throw InvalidArgument("level z is not reached by the section on both sides of the grid");
  }
  out.lo = crossing(g[*left], m.x);
  out.hi = crossing(g[*right], m.x);
  return out;
}

std::vector<bool> companion_injectivity(const MinimalSection1D& section) {
  if (section.companions.empty()) return {};
  const auto k = static_cast<std::size_t>(section.companions.front().size());
  std::vector<bool> out(k, true);
  for (std::size_t c = 0; c < k; ++c) {
    bool increasing = true;
    bool decreasing = true;
    for (std::size_t j = 1; j < section.companions.size(); ++j) {
      const double prev = section.companions[j - 1][static_cast<Eigen::Index>(c)];
      const double cur = section.companions[j][static_cast<Eigen::Index>(c)];
      increasing = increasing && cur > prev;
      decreasing = decreasing && cur < prev;
    }
    out[c] = increasing || decreasing;
  }
  return out;
}

NestingReport nesting_check(const MeritFunction& merit, const ParameterSplit& outer_split,
                            const std::vector<int>& inner_x, int grid_points, double tolerance) {
  const auto& outer_x = outer_split.x_indices();
  if (inner_x.empty() || inner_x.size() >= outer_x.size()) {
    throw InvalidArgument("inner x must be a non-empty proper subset of the outer x");
  }
  for (int i : inner_x) {
    if (std::find(outer_x.begin(), outer_x.end(), i) == outer_x.end()) {
      throw InvalidArgument("inner x index " + std::to_string(i) + " is not in the outer x");
    }
  }
  require_positive(probe_full_convexity(merit));

  const auto inner_split = ParameterSplit::from_x(inner_x, merit.dimension());
  std::vector<int> free_coords;  // positions within outer_x not fixed by inner_x
  std::vector<std::vector<double>> free_grids;
  for (std::size_t a = 0; a < outer_x.size(); ++a) {
    if (std::find(inner_x.begin(), inner_x.end(), outer_x[a]) != inner_x.end()) continue;
    free_coords.push_back(static_cast<int>(a));
    const auto& b = merit.box()[outer_x[a]];
    free_grids.push_back(uniform_grid(b.lo, b.hi, grid_points));
  }
  std::vector<int> inner_pos;  // positions within outer_x of the inner coordinates
  for (int i : inner_x) {
    inner_pos.push_back(static_cast<int>(std::distance(
        outer_x.begin(), std::find(outer_x.begin(), outer_x.end(), i))));
  }

  SectionEvaluator direct(merit, inner_split);
  SectionEvaluator outer(merit, outer_split);
  double x_tol = 1e-10;
  for (int c : free_coords) x_tol = std::max(x_tol, 1e-10 * merit.box()[outer_x[static_cast<std::size_t>(c)]].width());

  NestingReport report{outer_x, inner_x, {}, 0.0, tolerance, false};
  const std::size_t k = inner_x.size();
  std::vector<int> counter(k, 0);
  while (true) {
    Vector xp(static_cast<Eigen::Index>(k));
    for (std::size_t a = 0; a < k; ++a) {
      const auto& b = merit.box()[inner_x[a]];
      xp[static_cast<Eigen::Index>(a)] = b.lo + b.width() * counter[a] / (grid_points - 1);
    }
    NestingPoint point{xp, direct.value(xp), 0.0};
    auto restricted = [&](const Vector& z) {
      Vector xo(static_cast<Eigen::Index>(outer_x.size()));
      for (std::size_t a = 0; a < k; ++a) xo[inner_pos[a]] = xp[static_cast<Eigen::Index>(a)];
      for (std::size_t a = 0; a < free_coords.size(); ++a) {
        xo[free_coords[a]] = z[static_cast<Eigen::Index>(a)];
      }
      return outer.value(xo);
    };
    point.iterated = cyclic_coordinate_search(restricted, free_grids, x_tol).value;
    report.max_abs_difference =
        std::max(report.max_abs_difference, std::abs(point.direct - point.iterated));
    report.points.push_back(std::move(point));

    std::size_t a = 0;
    while (a < k && ++counter[a] == grid_points) counter[a++] = 0;
    if (a == k) break;
  }
  report.pass = report.max_abs_difference <= tolerance;
  return report;
}

}  // namespace hlsq
