#include "hlsq/hierarchical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "hlsq/errors.hpp"
#include "hlsq/numerics.hpp"

namespace hlsq {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 40;

double widest_side(const DomainBox& box, const std::vector<int>& coords) {
  double w = 0.0;
  for (int i : coords) w = std::max(w, box[i].width());
  return w;
}

std::vector<int> all_coordinates(int m) {
  std::vector<int> v(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

}  // namespace

const char* to_string(SolveMethod m) { return m == SolveMethod::hierarchical ? "hierarchical" : "direct"; }

SolveReport solve_hierarchical(const MeritFunction& merit, const ParameterSplit& split,
                               const HierarchicalOptions& options) {
  if (split.dimension() != merit.dimension()) {
    throw InvalidArgument("split dimension does not match the merit function");
  }
  ConvexityCertificate cert = options.certificate && options.certificate->split == split
                                  ? *options.certificate
                                  : probe_y_convexity(merit, split, options.probe_density);
  require_positive(cert);

  const auto& box = merit.box();
  const double x_tol = options.tolerances.x_tol.value_or(1e-8 * widest_side(box, split.x_indices()));
  SectionEvaluator section(merit, split, options.tolerances.inner_tol);

  std::vector<std::vector<double>> grids;
  for (int i : split.x_indices()) grids.push_back(uniform_grid(box[i].lo, box[i].hi, options.grid_density));

  SolveReport report;
  report.method = SolveMethod::hierarchical;
  report.split = split;
  report.outer_evaluations_by_coordinate.assign(static_cast<std::size_t>(merit.dimension()), 0);

  int outer = 0;
  auto section_value = [&](const Vector& x) {
    ++outer;
    return section.value(x);
  };
  const CoordinateSearchResult search = cyclic_coordinate_search(section_value, grids, x_tol);
  for (std::size_t a = 0; a < split.x_indices().size(); ++a) {
    report.outer_evaluations_by_coordinate[static_cast<std::size_t>(split.x_indices()[a])] =
        search.evaluations_per_coordinate[a];
  }

  ++outer;
  const SubMinimum final_slice = section.solve(search.x);
  report.minimizer = split.assemble(search.x, final_slice.y_star);
  report.value = final_slice.value;
  report.inner_solves = section.inner_solves();
  report.outer_evaluations = outer;
  report.iterations = search.cycles;
  report.brackets = search.brackets;
  report.convexity = std::move(cert);
  report.gradient_norm = fd_gradient(merit, report.minimizer).values.norm();
  if (report.gradient_norm > options.tolerances.outer_tol) {
    std::ostringstream os;
    os << "hierarchical solve stopped with gradient norm " << report.gradient_norm
       << " above the outer tolerance " << options.tolerances.outer_tol;
    throw ConvergenceError(os.str(), report.minimizer, report.gradient_norm);
  }
  return report;
}

SolveReport solve_direct(const MeritFunction& merit, const ParameterVector& p0,
                         const Tolerances& tolerances, int max_iter) {
  const auto& box = merit.box();
  if (!box.contains(p0)) throw InvalidArgument("direct solve start point is outside the domain box");
  const double x_tol =
      tolerances.x_tol.value_or(1e-8 * widest_side(box, all_coordinates(merit.dimension())));
  constexpr double eps = std::numeric_limits<double>::epsilon();

  SolveReport report;
  report.method = SolveMethod::direct;
  report.outer_evaluations_by_coordinate.assign(static_cast<std::size_t>(merit.dimension()), 0);

  Vector p = p0;
  // Convergence is judged on the step just taken, so the final small step is applied.
  double last_step = std::numeric_limits<double>::infinity();
  for (int iter = 0;; ++iter) {
    const DerivativeReport d = fd_hessian(merit, p);
    const double gnorm = d.gradient.norm();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(d.hessian);
    const Vector& lambda = eig.eigenvalues();
    const double floor = 1e-8 * std::max(1.0, lambda.cwiseAbs().maxCoeff());
    const Vector inv = lambda.cwiseAbs().cwiseMax(floor).cwiseInverse();
    const Vector step = -(eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose() * d.gradient);

    auto finish = [&] {
      report.minimizer = p;
      report.value = merit(p);
      report.gradient_norm = gnorm;
      report.iterations = iter;
      return report;
    };
    if (gnorm <= tolerances.outer_tol && last_step <= x_tol) return finish();
    if (iter >= max_iter) {
      throw ConvergenceError("direct Newton did not converge in " + std::to_string(max_iter) +
                                 " iterations",
                             p, gnorm);
    }

    const double f0 = merit(p);
    const double slope = d.gradient.dot(step);
    double t = 1.0;
    bool accepted = false;
    Vector trial;
    for (int halving = 0; halving <= kMaxHalvings; ++halving) {
      trial = box.clamp(p + t * step);
      if (merit(trial) <= f0 + kArmijo * t * slope + 4.0 * eps * std::abs(f0)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (gnorm <= tolerances.outer_tol) return finish();
      throw ConvergenceError("direct Newton line search failed", p, gnorm);
    }
    last_step = (trial - p).lpNorm<Eigen::Infinity>();
    p = trial;
  }
}

EquivalenceReport equivalence_report(const MeritFunction& merit, const ParameterSplit& split,
                                     const std::vector<ParameterVector>& starts,
                                     const HierarchicalOptions& options) {
  EquivalenceReport out;
  HierarchicalOptions opts = options;
  if (!opts.certificate || opts.certificate->split != split) {
    opts.certificate = probe_y_convexity(merit, split, options.probe_density);
  }
  out.hierarchical = solve_hierarchical(merit, split, opts);
  out.candidates.push_back(out.hierarchical.minimizer);

  if (split.n() == 1) {
    const int i = split.x_indices().front();
    const auto& b = merit.box()[i];
    TraceOptions trace_opts{options.tolerances.inner_tol, opts.certificate, options.probe_density};
    const MinimalSection1D section =
        minimal_section_1d(merit, i, uniform_grid(b.lo, b.hi, options.grid_density), trace_opts);
    for (const auto& m : section.local_minima) {
      if (m.plateau) continue;
      out.candidates.push_back(split.assemble(Vector::Constant(1, m.x), m.companions));
    }
  }

  for (const auto& start : starts) {
    DirectOutcome outcome;
    outcome.start = start;
    try {
      outcome.report = solve_direct(merit, start, options.tolerances);
    } catch (const Error& e) {
      outcome.error = e.what();
      out.direct.push_back(std::move(outcome));
      continue;
    }
    const ParameterVector& pd = outcome.report->minimizer;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : out.candidates) {
      const double dist = (pd - c).lpNorm<Eigen::Infinity>();
      if (dist < best) {
        best = dist;
        outcome.value_gap = std::abs(outcome.report->value - merit(c));
      }
    }
    outcome.distance = best;
    ++out.converged;
    out.max_distance = std::max(out.max_distance, outcome.distance);
    out.max_value_gap = std::max(out.max_value_gap, outcome.value_gap);
    out.direct.push_back(std::move(outcome));
  }
  return out;
}

std::vector<ParameterVector> random_starts(const DomainBox& box, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.1, 0.9);
  std::vector<ParameterVector> starts;
  for (int k = 0; k < count; ++k) {
    ParameterVector p(box.dimension());
    for (int i = 0; i < box.dimension(); ++i) p[i] = box[i].lo + box[i].width() * unit(rng);
    starts.push_back(std::move(p));
  }
  return starts;
}

RegularizationRecovery recover_from_anchor(const MeritFunction& merit, int anchor_index,
                                           double anchor_value, const TraceOptions& options) {
  if (anchor_index < 0 || anchor_index >= merit.dimension()) {
    throw InvalidArgument("anchor index out of range");
  }
  if (!merit.box()[anchor_index].contains(anchor_value)) {
    throw InvalidArgument("anchor value lies outside the domain box");
  }
  const auto split = ParameterSplit::single(anchor_index, merit.dimension());
  const ConvexityCertificate cert = options.certificate && options.certificate->split == split
                                        ? *options.certificate
                                        : probe_y_convexity(merit, split, options.probe_density);
  require_positive(cert);

  const Vector x = Vector::Constant(1, anchor_value);
  const SubMinimum s = subminimize({merit, split, x}, std::nullopt, options.inner_tol);
  RegularizationRecovery out;
  out.anchor_index = anchor_index;
  out.anchor_value = anchor_value;
  out.recovered = split.assemble(x, s.y_star);
  out.value = s.value;
  out.section_residual = s.grad_y_norm;
  out.inner_tol = s.inner_tol;
  return out;
}

}  // namespace hlsq
