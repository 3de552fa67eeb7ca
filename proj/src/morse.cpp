#include "hlsq/morse.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "hlsq/errors.hpp"

namespace hlsq {

namespace {

constexpr int kMaxNewton = 100;

// Interior seed grid: node k of `density` sits at lo + (k + 1) * w / (density + 1).
std::vector<ParameterVector> seed_grid(const DomainBox& box, int density) {
  const int m = box.dimension();
  std::vector<ParameterVector> seeds;
  std::vector<int> counter(static_cast<std::size_t>(m), 0);
  while (true) {
    ParameterVector p(m);
    for (int i = 0; i < m; ++i) {
      p[i] = box[i].lo + box[i].width() * (counter[static_cast<std::size_t>(i)] + 1) / (density + 1);
    }
    seeds.push_back(std::move(p));
    int a = 0;
    while (a < m && ++counter[static_cast<std::size_t>(a)] == density) counter[static_cast<std::size_t>(a++)] = 0;
    if (a == m) break;
  }
  return seeds;
}

std::string describe(const ParameterVector& p) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (Eigen::Index i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ")";
  return os.str();
}

// The merit function with its box replaced; derivatives near the search box
// boundary then use one-sided stencils that stay inside it.
MeritFunction on_box(const MeritFunction& merit, const DomainBox& box) {
  if (box.dimension() != merit.dimension()) throw InvalidArgument("box dimension does not match");
  return merit.with_box(box);
}

std::vector<int> all_coordinates(int m) {
  std::vector<int> all(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) all[static_cast<std::size_t>(i)] = i;
  return all;
}

// Newton iteration for grad F = 0. Returns nothing if the iterate leaves the box
// or the iteration budget runs out.
std::optional<ParameterVector> newton_on_gradient(const MeritFunction& f, ParameterVector p,
                                                  double critical_tol) {
  const auto& box = f.box();
  const auto all = all_coordinates(f.dimension());
  const double fallback_step = 1e-2 * box.diagonal();
  const double max_newton_step = 0.25 * box.diagonal();
  for (int iter = 0; iter < kMaxNewton; ++iter) {
    const Vector g = fd_gradient(f, p).values;
    const double gnorm = g.norm();
    if (gnorm <= critical_tol) return p;
    const Matrix h = fd_hessian_block(f, p, all).values;
    const EigenSummary eig = eigen_index(h);
    Vector step;
    if (eig.near_zero_count > 0) {
      const double lambda_max = std::max(eig.eigenvalues.cwiseAbs().maxCoeff(), 1e-300);
      step = -g / gnorm * std::min(fallback_step, gnorm / lambda_max);
    } else {
      step = -h.ldlt().solve(g);
      const double len = step.norm();
      if (len > max_newton_step) step *= max_newton_step / len;
    }
    p += step;
    if (!box.contains(p)) return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

CriticalPointSearch find_critical_points(const MeritFunction& merit, const DomainBox& box,
                                         int seed_density, std::optional<double> critical_tol) {
  if (seed_density < 3) throw InvalidArgument("critical point search needs seed_density >= 3");
  const MeritFunction f = on_box(merit, box);
  const std::vector<ParameterVector> seeds = seed_grid(box, seed_density);

  CriticalPointSearch out;
  out.seeds = static_cast<int>(seeds.size());
  if (critical_tol) {
    out.critical_tol = *critical_tol;
  } else {
    std::vector<double> norms;
    norms.reserve(seeds.size());
    for (const auto& s : seeds) norms.push_back(fd_gradient(f, s).values.norm());
    std::nth_element(norms.begin(), norms.begin() + static_cast<long>(norms.size() / 2), norms.end());
    out.critical_tol = 1e-8 * std::max(1.0, norms[norms.size() / 2]);
  }
  std::vector<std::pair<ParameterVector, double>> converged;  // location, gradient norm
  for (const auto& seed : seeds) {
    const auto p = newton_on_gradient(f, seed, out.critical_tol);
    if (!p) {
      ++out.dropped;
      continue;
    }
    const double gnorm = fd_gradient(f, *p).values.norm();
    bool merged = false;
    for (auto& [q, qn] : converged) {
      const double radius = 1e-5 * std::max(1.0, q.lpNorm<Eigen::Infinity>());
      if ((q - *p).lpNorm<Eigen::Infinity>() <= radius) {
        if (gnorm < qn) {
          q = *p;
          qn = gnorm;
        }
        merged = true;
        break;
      }
    }
    if (!merged) converged.emplace_back(*p, gnorm);
  }
  out.merge_radius = 1e-5;

  const auto all = all_coordinates(f.dimension());
  for (const auto& [p, gnorm] : converged) {
    CriticalPoint cp;
    cp.location = p;
    cp.value = f(p);
    cp.grad_norm = gnorm;
    cp.eigen = eigen_index(fd_hessian_block(f, p, all).values);
    cp.index_gamma = cp.eigen.negative_count;
    cp.degenerate = cp.eigen.near_zero_count > 0;
    out.points.push_back(std::move(cp));
  }
  std::sort(out.points.begin(), out.points.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    return std::lexicographical_compare(a.location.begin(), a.location.end(), b.location.begin(),
                                        b.location.end());
  });
  return out;
}

OutwardCheck check_outward_gradient(const MeritFunction& merit, const DomainBox& box,
                                    int boundary_density) {
  if (boundary_density < 3) throw InvalidArgument("outward check needs boundary_density >= 3");
  const MeritFunction f = on_box(merit, box);
  const int m = box.dimension();
  OutwardCheck out;
  out.outward = true;
  for (int face = 0; face < m; ++face) {
    for (int side = 0; side < 2; ++side) {
      const double sign = side == 0 ? -1.0 : 1.0;
      // Counter over the m - 1 coordinates spanning the face.
      std::vector<int> counter(static_cast<std::size_t>(m - 1), 0);
      while (true) {
        ParameterVector p(m);
        for (int i = 0, a = 0; i < m; ++i) {
          if (i == face) {
            p[i] = side == 0 ? box[i].lo : box[i].hi;
          } else {
            p[i] = box[i].lo + box[i].width() * (counter[static_cast<std::size_t>(a++)] + 0.5) /
                                   boundary_density;
          }
        }
        const double normal_component = sign * fd_gradient(f, p, {face}).values[0];
        ++out.sampled;
        if (!(normal_component > 0.0) && out.outward) {
          out.outward = false;
          out.violation = p;
        }
        std::size_t a = 0;
        while (a < counter.size() && ++counter[a] == boundary_density) counter[a++] = 0;
        if (a == counter.size()) break;
      }
    }
  }
  return out;
}

MorseCensus morse_equality_audit(const std::vector<CriticalPoint>& points, bool outward) {
  std::ostringstream degenerate;
  for (const auto& p : points) {
    if (p.degenerate) {
      degenerate << "\n  " << describe(p.location) << " (" << p.eigen.near_zero_count
                 << " near-zero Hessian eigenvalue" << (p.eigen.near_zero_count == 1 ? "" : "s") << ")";
    }
  }
  if (!degenerate.str().empty()) {
    throw DegeneracyError("Morse audit refused: degenerate critical points make the index undefined:" +
                          degenerate.str());
  }
  MorseCensus census;
  census.boundary_outward = outward;
  for (const auto& p : points) ++census.counts[p.index_gamma];
  for (const auto& [k, c] : census.counts) census.alternating_sum += (k % 2 == 0 ? 1 : -1) * c;
  census.pass = outward && census.alternating_sum == 1;
  if (census.pass) {
    census.diagnosis = "alternating sum equals 1 with outward boundary gradient";
  } else if (!outward) {
    census.diagnosis = "boundary gradient is not outward; the ball equality does not apply";
  } else {
    census.diagnosis = "alternating sum " + std::to_string(census.alternating_sum) +
                       " != 1: missing critical point or boundary leak";
  }
  return census;
}

}  // namespace hlsq
