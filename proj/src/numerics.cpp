#include "hlsq/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>

#include <Eigen/Dense>

#include "hlsq/errors.hpp"

namespace hlsq {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// (offset in steps, weight) pairs of a one-dimensional stencil.
using Stencil = std::vector<std::pair<int, double>>;

enum class Side { central, forward, backward };

const Stencil& first_derivative(Side side) {
  static const Stencil central{{-1, -0.5}, {1, 0.5}};
  static const Stencil forward{{0, -1.5}, {1, 2.0}, {2, -0.5}};
  static const Stencil backward{{0, 1.5}, {-1, -2.0}, {-2, 0.5}};
  switch (side) {
    case Side::forward: return forward;
    case Side::backward: return backward;
    default: return central;
  }
}

const Stencil& second_derivative(Side side) {
  static const Stencil central{{-1, 1.0}, {0, -2.0}, {1, 1.0}};
  static const Stencil forward{{0, 2.0}, {1, -5.0}, {2, 4.0}, {3, -1.0}};
  static const Stencil backward{{0, 2.0}, {-1, -5.0}, {-2, 4.0}, {-3, -1.0}};
  switch (side) {
    case Side::forward: return forward;
    case Side::backward: return backward;
    default: return central;
  }
}

// Picks the stencil side so that every node with |offset| <= reach stays in the box.
Side choose_side(const Interval& b, double v, double h, int reach) {
  const bool room_lo = v - h >= b.lo;
  const bool room_hi = v + h <= b.hi;
  if (room_lo && room_hi) return Side::central;
  if (v + reach * h <= b.hi) return Side::forward;
  if (v - reach * h >= b.lo) return Side::backward;
  std::ostringstream os;
  os << "domain interval [" << b.lo << ", " << b.hi << "] too narrow for a finite-difference step "
     << h;
  throw InvalidArgument(os.str());
}

double step_for(double v, double base) { return base * std::max(1.0, std::abs(v)); }

}  // namespace

FdGradient fd_gradient(const MeritFunction& merit, const Vector& p) {
  std::vector<int> all(static_cast<std::size_t>(merit.dimension()));
  std::iota(all.begin(), all.end(), 0);
  return fd_gradient(merit, p, all);
}

FdGradient fd_gradient(const MeritFunction& merit, const Vector& p, const std::vector<int>& indices) {
  static const double base = std::cbrt(kEps);
  const auto& box = merit.box();
  const Eigen::Index k = static_cast<Eigen::Index>(indices.size());
  FdGradient out{Vector(k), Vector(k), false};
  Vector q = p;
  for (Eigen::Index a = 0; a < k; ++a) {
    const int i = indices[static_cast<std::size_t>(a)];
    const double h = step_for(p[i], base);
    const Side side = choose_side(box[i], p[i], h, 2);
    out.one_sided = out.one_sided || side != Side::central;
    double sum = 0.0;
    for (const auto& [offset, weight] : first_derivative(side)) {
      q[i] = p[i] + offset * h;
      sum += weight * merit(q);
    }
    q[i] = p[i];
    const double g = sum / h;
    if (!std::isfinite(g)) {
      throw NonFiniteError("non-finite gradient entry at coordinate " + std::to_string(i));
    }
    out.values[a] = g;
    out.steps[a] = h;
  }
  return out;
}

FdHessian fd_hessian_block(const MeritFunction& merit, const Vector& p,
                           const std::vector<int>& indices) {
  static const double base = std::pow(kEps, 0.25);
  const auto& box = merit.box();
  const Eigen::Index k = static_cast<Eigen::Index>(indices.size());
  Vector steps(k);
  std::vector<Side> diag_side(static_cast<std::size_t>(k));
  std::vector<Side> first_side(static_cast<std::size_t>(k));
  bool one_sided = false;
  for (Eigen::Index a = 0; a < k; ++a) {
    const int i = indices[static_cast<std::size_t>(a)];
    steps[a] = step_for(p[i], base);
    diag_side[static_cast<std::size_t>(a)] = choose_side(box[i], p[i], steps[a], 3);
    first_side[static_cast<std::size_t>(a)] = choose_side(box[i], p[i], steps[a], 2);
    one_sided = one_sided || diag_side[static_cast<std::size_t>(a)] != Side::central;
  }

  Matrix raw(k, k);
  Vector q = p;
  for (Eigen::Index a = 0; a < k; ++a) {
    const int i = indices[static_cast<std::size_t>(a)];
    const double hi = steps[a];
    double sum = 0.0;
    for (const auto& [offset, weight] : second_derivative(diag_side[static_cast<std::size_t>(a)])) {
      q[i] = p[i] + offset * hi;
      sum += weight * merit(q);
    }
    q[i] = p[i];
    raw(a, a) = sum / (hi * hi);
  }
  // Off-diagonal entries are computed for both orderings; the nesting order
  // of the tensor-product sum differs, so H_ij and H_ji round independently.
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) {
      if (a == b) continue;
      const int i = indices[static_cast<std::size_t>(a)];
      const int j = indices[static_cast<std::size_t>(b)];
      double sum = 0.0;
      for (const auto& [oi, wi] : first_derivative(first_side[static_cast<std::size_t>(a)])) {
        double inner = 0.0;
        for (const auto& [oj, wj] : first_derivative(first_side[static_cast<std::size_t>(b)])) {
          q[i] = p[i] + oi * steps[a];
          q[j] = p[j] + oj * steps[b];
          inner += wj * merit(q);
        }
        sum += wi * inner;
      }
      q[i] = p[i];
      q[j] = p[j];
      raw(a, b) = sum / (steps[a] * steps[b]);
    }
  }
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) {
      if (!std::isfinite(raw(a, b))) {
        std::ostringstream os;
        os << "non-finite Hessian entry at coordinate pair (" << indices[static_cast<std::size_t>(a)]
           << ", " << indices[static_cast<std::size_t>(b)] << ")";
        throw NonFiniteError(os.str());
      }
    }
  }

  FdHessian out;
  out.values = 0.5 * (raw + raw.transpose());
  out.steps = steps;
  out.one_sided = one_sided;
  const double scale = std::max(1.0, raw.cwiseAbs().maxCoeff());
  out.raw_asymmetry = k > 0 ? (raw - raw.transpose()).cwiseAbs().maxCoeff() / scale : 0.0;
  return out;
}

DerivativeReport fd_hessian(const MeritFunction& merit, const Vector& p,
                            const std::optional<ParameterSplit>& split) {
  std::vector<int> all(static_cast<std::size_t>(merit.dimension()));
  std::iota(all.begin(), all.end(), 0);
  const FdGradient g = fd_gradient(merit, p);
  FdHessian h = fd_hessian_block(merit, p, all);

  DerivativeReport report;
  report.gradient = g.values;
  report.hessian = std::move(h.values);
  report.fd_step = h.steps;
  report.raw_asymmetry = h.raw_asymmetry;
  report.asymmetry_flagged = h.raw_asymmetry > kAsymmetryWarning;
  report.one_sided = g.one_sided || h.one_sided;
  if (split) {
    const auto& ys = split->y_indices();
    const Eigen::Index m = static_cast<Eigen::Index>(ys.size());
    report.y_block.resize(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b < m; ++b) {
        report.y_block(a, b) = report.hessian(ys[static_cast<std::size_t>(a)], ys[static_cast<std::size_t>(b)]);
      }
    }
  }
  return report;
}

EigenSummary eigen_index(const Matrix& h, std::optional<double> degeneracy_tol) {
  if (h.rows() == 0 || h.rows() != h.cols()) {
    throw InvalidArgument("eigen_index needs a non-empty square matrix");
  }
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw InvalidArgument("eigen_index needs a symmetric matrix");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  EigenSummary s;
  s.eigenvalues = solver.eigenvalues();
  const double largest = s.eigenvalues.cwiseAbs().maxCoeff();
  s.degeneracy_tol = degeneracy_tol.value_or(1e-6 * std::max(1.0, largest));
  s.min_abs = s.eigenvalues.cwiseAbs().minCoeff();
  for (double lambda : s.eigenvalues) {
    if (std::abs(lambda) <= s.degeneracy_tol) {
      ++s.near_zero_count;
    } else if (lambda < 0.0) {
      ++s.negative_count;
    } else {
      ++s.positive_count;
    }
  }
  return s;
}

bool is_positive_definite(const Matrix& h, std::optional<double> tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  const Vector& ev = solver.eigenvalues();
  const double norm = ev.cwiseAbs().maxCoeff();
  return ev.minCoeff() > tol.value_or(1e-8 * std::max(1.0, norm));
}

Vector linear_lsq_solve(const Matrix& a, const Vector& b) {
  if (a.rows() != b.size()) throw InvalidArgument("linear_lsq_solve: row count mismatch");
  if (a.rows() < a.cols()) {
    throw InvalidArgument("linear_lsq_solve needs at least as many rows as columns");
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  const int rank = static_cast<int>(qr.rank());
  if (rank < a.cols()) {
    throw RankDeficientError("design matrix is rank deficient: numerical rank " +
                                 std::to_string(rank) + " of " + std::to_string(a.cols()) + " columns",
                             rank);
  }
  return qr.solve(b);
}

}  // namespace hlsq
