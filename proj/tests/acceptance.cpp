// Acceptance run: one PASS/FAIL line per criterion, each with a wall-clock
// limit. Exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "hlsq/errors.hpp"
#include "hlsq/hierarchical.hpp"
#include "hlsq/minimal_section.hpp"
#include "hlsq/morse.hpp"
#include "hlsq/numerics.hpp"
#include "hlsq/subminimize.hpp"
#include "oracles.hpp"

using namespace hlsq;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) detail << "; ";
      detail << what;
      pass = false;
    }
  }
};

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

Vector random_interior(const DomainBox& box, std::mt19937_64& rng) {
  Vector p(box.dimension());
  for (int i = 0; i < box.dimension(); ++i) {
    const auto& b = box[i];
    const double margin = 0.05 * (b.hi - b.lo);
    p[i] = std::uniform_real_distribution<double>(b.lo + margin, b.hi - margin)(rng);
  }
  return p;
}

double inf_norm(const Vector& v) { return v.lpNorm<Eigen::Infinity>(); }

// Every direct start must converge to the hierarchical minimizer.
void compare_with_direct(Verdict& v, const std::string& label, const MeritFunction& f, const ParameterSplit& split,
                         std::uint64_t seed, double& worst_distance, double& worst_gap) {
  const auto hier = solve_hierarchical(f, split);
  for (const auto& start : random_starts(f.box(), 5, seed)) {
    try {
      const auto direct = solve_direct(f, start);
      const double distance = inf_norm(direct.minimizer - hier.minimizer);
      const double gap = std::abs(direct.value - hier.value) / std::max(1.0, std::abs(hier.value));
      worst_distance = std::max(worst_distance, distance);
      worst_gap = std::max(worst_gap, gap);
      v.require(distance <= 1e-6, label + " distance " + std::to_string(distance));
      v.require(gap <= 1e-10, label + " value gap " + std::to_string(gap));
    } catch (const Error& e) {
      v.require(false, label + " direct solve failed: " + e.what());
    }
  }
}

void criterion1(Verdict& v) {
  double distance = 0.0, gap = 0.0;
  const auto split = ParameterSplit::single(0, 2);
  std::uint64_t seed = 1;
  for (const char* name : {"QUAD", "SINE_VALLEY", "EXP_FIT"}) {
    compare_with_direct(v, name, catalog_entry(name).merit, split, seed++, distance, gap);
  }
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 20; ++k) {
    const int m = 2 + k % 4;
    const auto x = m >= 3 && k % 2 == 1 ? std::vector<int>{0, 1} : std::vector<int>{0};
    const auto q = oracle::random_interior_quadratic(m, x, rng);
    const auto f = MeritFunction::general(m, q, DomainBox::uniform(m));
    compare_with_direct(v, "quadratic " + std::to_string(k), f, ParameterSplit::from_x(x, m), seed++, distance, gap);
  }
  v.detail << (v.pass ? "" : "; ") << "max distance " << distance << ", max relative gap " << gap;
}

void criterion2(Verdict& v) {
  std::vector<Vector> grid;
  for (double x : uniform_grid(-std::numbers::pi, std::numbers::pi, 101)) grid.push_back(Vector::Constant(1, x));
  const auto t = trace_implicit(catalog_entry("SINE_VALLEY").merit, ParameterSplit::single(0, 2), grid);
  double worst = 0.0;
  bool residuals_ok = true;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    worst = std::max(worst, std::abs(t.g_values[j][0] - std::sin(grid[j][0])));
    residuals_ok = residuals_ok && t.residual_norms[j] <= t.inner_tols[j];
  }
  v.require(worst <= 1e-8, "g deviates from sin x");
  v.require(residuals_ok, "residual above inner_tol");
  v.detail << (v.pass ? "" : "; ") << "max |g - sin x| " << worst;
}

void criterion3(Verdict& v) {
  const auto& f = catalog_entry("EXP_FIT").merit;
  const auto split = ParameterSplit::single(0, 2);
  const auto r = solve_hierarchical(f, split);
  v.require(inf_norm(r.minimizer - v2(-0.5, 2.0)) <= 1e-6, "minimizer off");
  v.require(r.outer_evaluations_by_coordinate[1] == 0, "outer evaluations in the linear coordinate");
  v.require(!r.brackets.empty() && r.brackets.front().certified(), "no certified bracket");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> xs(-2.0, 1.0), ys(-10.0, 10.0);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const SliceProblem slice{f, split, Vector::Constant(1, xs(rng))};
    const auto linear = subminimize_linear(slice);
    const auto newton = subminimize_newton(slice, Vector::Constant(1, ys(rng)));
    worst = std::max(worst, inf_norm(newton.y_star - linear.y_star));
  }
  v.require(worst <= 1e-6, "Newton and linear elimination disagree");
  v.detail << (v.pass ? "" : "; ") << "minimizer (" << r.minimizer[0] << ", " << r.minimizer[1]
           << "), Newton vs elimination " << worst;
}

void criterion4(Verdict& v) {
  const auto& f = catalog_entry("ANISO_QUAD3").merit;
  const Matrix a = oracle::aniso_matrix();
  int pairs = 0;
  double worst = 0.0;
  for (int drop = 0; drop < 3; ++drop) {
    std::vector<int> outer;
    for (int i = 0; i < 3; ++i) {
      if (i != drop) outer.push_back(i);
    }
    for (int inner : outer) {
      const auto report = nesting_check(f, ParameterSplit::from_x(outer, 3), {inner}, 21);
      for (const auto& p : report.points) {
        const double exact = oracle::schur_min(a, {inner}, p.inner_x);
        worst = std::max({worst, std::abs(p.iterated - exact), std::abs(p.direct - exact)});
      }
      v.require(report.points.size() == 21, "grid size");
      ++pairs;
    }
  }
  v.require(worst <= 1e-6, "iterated sections differ from the Schur complement");
  v.detail << (v.pass ? "" : "; ") << pairs << " pairs, max error " << worst;
}

void criterion5(Verdict& v) {
  const auto& f = catalog_entry("QUAD").merit;
  double worst = 0.0;
  for (int axis = 0; axis < 2; ++axis) {
    const auto s = minimal_section_1d(f, axis, uniform_grid(-10, 10, 21));
    double prev_lo = -1e300, prev_hi = 1e300;
    for (double z : {4.0, 1.0, 0.25, 0.0}) {
      const auto in = sublevel_interval(s, z);
      const double half = std::sqrt(z);
      worst = std::max({worst, std::abs(in.lo + half), std::abs(in.hi - half)});
      v.require(in.lo > prev_lo && in.hi < prev_hi, "not strictly nested at z=" + std::to_string(z));
      prev_lo = in.lo;
      prev_hi = in.hi;
    }
  }
  v.require(worst <= 1e-8, "endpoint error");
  v.detail << (v.pass ? "" : "; ") << "max endpoint error " << worst;
}

MorseCensus census(const std::string& name) {
  const auto& f = catalog_entry(name).merit;
  const auto points = find_critical_points(f, f.box(), 9);
  return morse_equality_audit(points.points, check_outward_gradient(f, f.box(), 9).outward);
}

void criterion6(Verdict& v) {
  const auto quad = census("QUAD");
  v.require(quad.counts == std::map<int, int>{{0, 1}} && quad.alternating_sum == 1 && quad.pass, "QUAD census");
  const auto wells = census("TWO_WELLS");
  v.require(wells.counts == std::map<int, int>{{0, 2}, {1, 1}} && wells.alternating_sum == 1 && wells.pass,
            "TWO_WELLS census");
  try {
    census("DEGEN_LINE");
    v.require(false, "DEGEN_LINE audit not refused");
  } catch (const DegeneracyError& e) {
    v.require(std::string(e.what()).find("degenerate") != std::string::npos, "refusal lacks diagnosis");
  }
  v.detail << (v.pass ? "" : "; ") << "QUAD {0:1}, TWO_WELLS {0:2, 1:1}, DEGEN_LINE refused";
}

void criterion7(Verdict& v) {
  const auto& f = catalog_entry("TWO_WELLS").merit;
  const auto s = minimal_section_1d(f, 0, uniform_grid(-10, 10, 41));
  v.require(s.local_minima.size() == 2, "expected two section minima");
  if (s.local_minima.size() == 2) {
    v.require(std::abs(s.local_minima[0].x + 1) <= 1e-6 && std::abs(s.local_minima[1].x - 1) <= 1e-6,
              "section minima not at -1, 1");
  }
  std::vector<Vector> grid;
  for (double x : uniform_grid(-2, 2, 41)) grid.push_back(Vector::Constant(1, x));
  const auto t = trace_implicit(f, ParameterSplit::single(0, 2), grid);
  double worst = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (std::abs(std::abs(grid[j][0]) - 1.0) < 1e-12) worst = std::max(worst, std::abs(t.g_values[j][0] - grid[j][0]));
  }
  v.require(worst <= 1e-6, "trace misses (+-1, +-1)");
  v.detail << (v.pass ? "" : "; ") << "trace error at the minima " << worst;
}

void criterion8(Verdict& v) {
  const auto a = recover_from_anchor(catalog_entry("DEGEN_LINE").merit, 0, 0.5);
  v.require(inf_norm(a.recovered - v2(0.5, 1.5)) <= 1e-10, "DEGEN_LINE recovery off");
  const auto b = recover_from_anchor(catalog_entry("DEGEN_LINE_PERTURBED").merit, 0, 0.5);
  v.require(b.section_residual <= b.inner_tol, "perturbed residual above inner_tol");
  v.detail << (v.pass ? "" : "; ") << "recovered (" << a.recovered[0] << ", " << a.recovered[1]
           << "), perturbed residual " << b.section_residual;
}

void criterion9(Verdict& v) {
  std::mt19937_64 rng(9);
  double worst = 0.0;
  for (const auto& e : catalog()) {
    for (int k = 0; k < 100; ++k) {
      const Vector p = random_interior(e.merit.box(), rng);
      const auto exact = oracle::catalog_derivatives(e.name, p);
      const auto r = fd_hessian(e.merit, p);
      const double g = inf_norm(r.gradient - exact.gradient) / std::max(1.0, inf_norm(exact.gradient));
      const double h = (r.hessian - exact.hessian).lpNorm<Eigen::Infinity>() /
                       std::max(1.0, exact.hessian.lpNorm<Eigen::Infinity>());
      worst = std::max({worst, g, h});
      v.require(g <= 1e-5 && h <= 1e-5, e.name + " derivative error");
      if (!v.pass) break;
    }
  }
  v.detail << (v.pass ? "" : "; ") << catalog().size() << " entries, max relative error " << worst;
}

void criterion10(Verdict& v) {
  try {
    solve_hierarchical(catalog_entry("NEG_Y").merit, ParameterSplit::single(0, 2));
    v.require(false, "NEG_Y was solved");
  } catch (const ConvexityViolation& e) {
    v.require(e.witness().size() == 2, "witness missing");
    v.require(e.min_eigenvalue() <= 0.0, "witness eigenvalue positive");
    v.detail << "refused, witness (" << e.witness()[0] << ", " << e.witness()[1] << "), eigenvalue "
             << e.min_eigenvalue();
  }
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    double limit_seconds;
    std::function<void(Verdict&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, 30.0, criterion1}, {2, 1.0, criterion2}, {3, 2.0, criterion3}, {4, 5.0, criterion4},
      {5, 1.0, criterion5},  {6, 10.0, criterion6}, {7, 10.0, criterion7}, {8, 1.0, criterion8},
      {9, 30.0, criterion9}, {10, 1.0, criterion10},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("unexpected exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    v.require(seconds <= c.limit_seconds, "over the time limit");
    if (!v.pass) ++failures;
    std::cout << "criterion " << c.id << ": " << (v.pass ? "PASS" : "FAIL") << " (" << v.detail.str() << "; "
              << seconds << " s of " << c.limit_seconds << " s)\n";
  }
  return failures == 0 ? 0 : 1;
}
