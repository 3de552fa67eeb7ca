#include "hlsq/subminimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "hlsq/errors.hpp"
#include "hlsq/numerics.hpp"

namespace hlsq {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 40;

double min_eigenvalue(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

std::string format_point(const Vector& p) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (Eigen::Index i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ")";
  return os.str();
}

// Visits every node of a uniform tensor grid over the given coordinates of the box.
template <typename Visit>
void for_each_grid_node(const DomainBox& box, const std::vector<int>& coords, int density,
                        const Vector& base, Visit&& visit) {
  const std::size_t k = coords.size();
  std::vector<int> counter(k, 0);
  Vector p = base;
  while (true) {
    for (std::size_t a = 0; a < k; ++a) {
      const auto& b = box[coords[a]];
      p[coords[a]] = b.lo + b.width() * counter[a] / (density - 1);
    }
    visit(p);
    std::size_t a = 0;
    while (a < k && ++counter[a] == density) counter[a++] = 0;
    if (a == k) break;
  }
}

ConvexityCertificate probe(const MeritFunction& merit, const std::vector<int>& grid_coords,
                           int density, const std::function<Matrix(const Vector&)>& block_hessian) {
  if (density < 3) throw InvalidArgument("convexity probe needs grid_density >= 3");
  ConvexityCertificate cert;
  cert.grid_density = density;
  cert.min_eig_over_samples = std::numeric_limits<double>::infinity();
  std::optional<ParameterVector> first_violation;
  double violation_eig = 0.0;
  for_each_grid_node(merit.box(), grid_coords, density, merit.box().center(), [&](const Vector& p) {
    const Matrix h = block_hessian(p);
    const double lambda = min_eigenvalue(h);
    ++cert.sampled_points;
    cert.min_eig_over_samples = std::min(cert.min_eig_over_samples, lambda);
    if (!is_positive_definite(h) && (!first_violation || lambda < violation_eig)) {
      first_violation = p;
      violation_eig = lambda;
    }
  });
  if (first_violation) {
    cert.verdict = ConvexityVerdict::violated;
    cert.witness = first_violation;
    cert.witness_eig = violation_eig;
  } else {
    cert.verdict = ConvexityVerdict::positive_definite_everywhere_sampled;
  }
  return cert;
}

}  // namespace

const char* to_string(SubMethod m) {
  return m == SubMethod::linear_elimination ? "linear_elimination" : "newton";
}

int default_probe_density(int dimension) {
  if (dimension <= 4) return 21;
  if (dimension <= 8) return 7;
  return 3;
}

bool supports_linear_elimination(const MeritFunction& merit, const ParameterSplit& split) {
  const auto natural = merit.natural_split();
  return natural && *natural == split;
}

ConvexityCertificate probe_y_convexity(const MeritFunction& merit, const ParameterSplit& split,
                                       std::optional<int> grid_density) {
  if (split.dimension() != merit.dimension()) {
    throw InvalidArgument("split dimension does not match the merit function");
  }
  const int density = grid_density.value_or(default_probe_density(merit.dimension()));
  ConvexityCertificate cert;
  if (supports_linear_elimination(merit, split)) {
    const auto* model = merit.partially_linear_model();
    const int n = model->nonlinear_dim;
    cert = probe(merit, split.x_indices(), density, [&](const Vector& p) -> Matrix {
      const Matrix phi = model->design_matrix(p.head(n));
      return 2.0 * phi.transpose() * phi;
    });
  } else {
    std::vector<int> all(static_cast<std::size_t>(merit.dimension()));
    std::iota(all.begin(), all.end(), 0);
    cert = probe(merit, all, density, [&](const Vector& p) {
      return fd_hessian_block(merit, p, split.y_indices()).values;
    });
  }
  cert.split = split;
  return cert;
}

ConvexityCertificate probe_full_convexity(const MeritFunction& merit, std::optional<int> grid_density) {
  const int density = grid_density.value_or(default_probe_density(merit.dimension()));
  std::vector<int> all(static_cast<std::size_t>(merit.dimension()));
  std::iota(all.begin(), all.end(), 0);
  return probe(merit, all, density,
               [&](const Vector& p) { return fd_hessian_block(merit, p, all).values; });
}

void require_positive(const ConvexityCertificate& certificate) {
  if (certificate.positive()) return;
  std::ostringstream os;
  os << "convexity certificate violated: Hessian block minimum eigenvalue "
     << certificate.witness_eig << " at witness point " << format_point(*certificate.witness);
  throw ConvexityViolation(os.str(), *certificate.witness, certificate.witness_eig);
}

SubMinimum subminimize_linear(const SliceProblem& problem) {
  if (!supports_linear_elimination(problem.merit, problem.split)) {
    throw InvalidArgument(
        "linear elimination needs a partially linear merit function and its natural split");
  }
  const auto* model = problem.merit.partially_linear_model();
  const Vector& x = problem.x_fixed;
  const Matrix phi = model->design_matrix(x);
  const Vector b = model->rhs(x);

  SubMinimum out;
  try {
    out.y_star = linear_lsq_solve(phi, b);
  } catch (const RankDeficientError& e) {
    throw RankDeficientError(std::string(e.what()) + " at x = " + format_point(x), e.rank());
  }
  const Vector r = phi * out.y_star - b;
  out.value = problem.merit(problem.split.assemble(x, out.y_star));
  out.grad_y_norm = (2.0 * phi.transpose() * r).norm();
  out.y_hessian_min_eig = min_eigenvalue(2.0 * phi.transpose() * phi);
  out.y_negative_count = 0;
  out.method = SubMethod::linear_elimination;
  out.iterations = 1;
  out.inner_tol = 1e-10 * std::max(1.0, out.value);
  return out;
}

double default_inner_tol(const SliceProblem& problem, const Vector& y0) {
  return 1e-10 * std::max(1.0, problem.merit(problem.split.assemble(problem.x_fixed, y0)));
}

SubMinimum subminimize_newton(const SliceProblem& problem, const Vector& y0,
                              std::optional<double> inner_tol, int max_iter) {
  const auto& split = problem.split;
  const auto& merit = problem.merit;
  const DomainBox ybox = merit.box().restrict_to(split.y_indices());
  const Vector& x = problem.x_fixed;
  if (y0.size() != split.m()) throw InvalidArgument("initial y has the wrong dimension");

  Vector y = ybox.clamp(y0);
  const double tol = inner_tol.value_or(default_inner_tol(problem, y));
  constexpr double eps = std::numeric_limits<double>::epsilon();

  for (int iter = 0;; ++iter) {
    const ParameterVector p = split.assemble(x, y);
    const Vector g = fd_gradient(merit, p, split.y_indices()).values;
    const double gnorm = g.norm();
    const Matrix h = fd_hessian_block(merit, p, split.y_indices()).values;
    const double lambda_min = min_eigenvalue(h);

    if (!is_positive_definite(h)) {
      std::ostringstream os;
      os << "y-Hessian not positive definite (min eigenvalue " << lambda_min << ") at "
         << format_point(p);
      throw ConvexityViolation(os.str(), p, lambda_min);
    }
    if (gnorm <= tol) {
      SubMinimum out;
      out.y_star = y;
      out.value = merit(p);
      out.grad_y_norm = gnorm;
      out.y_hessian_min_eig = lambda_min;
      out.y_negative_count = eigen_index(h).negative_count;
      out.method = SubMethod::newton;
      out.iterations = iter;
      out.inner_tol = tol;
      return out;
    }
    if (iter >= max_iter) {
      throw ConvergenceError("slice Newton exceeded " + std::to_string(max_iter) +
                                 " iterations; best iterate " + format_point(p) +
                                 ", gradient norm " + std::to_string(gnorm),
                             p, gnorm);
    }

    const Vector step = -h.llt().solve(g);
    const double f0 = merit(p);
    const double slope = g.dot(step);
    double t = 1.0;
    bool accepted = false;
    Vector trial;
    for (int halving = 0; halving <= kMaxHalvings; ++halving) {
      trial = ybox.clamp(y + t * step);
      const double f = merit(split.assemble(x, trial));
      if (f <= f0 + kArmijo * t * slope + 4.0 * eps * std::abs(f0)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      throw ConvergenceError("slice Newton line search failed at " + format_point(p) +
                                 ", gradient norm " + std::to_string(gnorm),
                             p, gnorm);
    }
    y = trial;
  }
}

SubMinimum subminimize(const SliceProblem& problem, const std::optional<Vector>& warm,
                       std::optional<double> inner_tol) {
  if (supports_linear_elimination(problem.merit, problem.split)) {
    return subminimize_linear(problem);
  }
  const Vector y0 =
      warm ? *warm : problem.merit.box().restrict_to(problem.split.y_indices()).center();
  return subminimize_newton(problem, y0, inner_tol);
}

}  // namespace hlsq
