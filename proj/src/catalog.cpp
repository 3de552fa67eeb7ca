#include <cmath>

#include <Eigen/Dense>

#include "hlsq/errors.hpp"
#include "hlsq/problem.hpp"

namespace hlsq {

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

Matrix anisotropic_matrix() {
  Matrix a(3, 3);
  a << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  return a;
}

std::vector<ProblemCatalogEntry> build_catalog() {
  using R = MeritFunction::Residual;
  std::vector<ProblemCatalogEntry> entries;
  const auto split2 = ParameterSplit::single(0, 2);

  entries.push_back({"QUAD",
                     build_residual_merit({[](const Vector& p) { return p[0]; },
                                           [](const Vector& p) { return p[1]; }},
                                          2, DomainBox::uniform(2)),
                     {vec({0, 0})},
                     KnownImplicit{"g(x) = 0", split2, [](const Vector&) { return vec({0}); }},
                     ConvexityClass::strictly_convex});

  entries.push_back({"QUAD3",
                     build_residual_merit({[](const Vector& p) { return p[0]; },
                                           [](const Vector& p) { return p[1]; },
                                           [](const Vector& p) { return p[2]; }},
                                          3, DomainBox::uniform(3)),
                     {vec({0, 0, 0})},
                     KnownImplicit{"g(x) = (0, 0)", ParameterSplit::single(0, 3),
                                   [](const Vector&) { return vec({0, 0}); }},
                     ConvexityClass::strictly_convex});

  {
    const Matrix a = anisotropic_matrix();
    const Matrix ayy = a.bottomRightCorner(2, 2);
    const Vector ayx = a.bottomLeftCorner(2, 1);
    entries.push_back(
        {"ANISO_QUAD3",
         MeritFunction::general(
             3, [a](const Vector& p) { return p.dot(a * p); }, DomainBox::uniform(3)),
         {vec({0, 0, 0})},
         KnownImplicit{"g(x) = -A_yy^{-1} A_yx x", ParameterSplit::single(0, 3),
                       [ayy, ayx](const Vector& x) -> Vector {
                         return -ayy.ldlt().solve(ayx * x[0]);
                       }},
         ConvexityClass::strictly_convex});
  }

  entries.push_back({"SINE_VALLEY",
                     build_residual_merit({[](const Vector& p) { return p[0]; },
                                           [](const Vector& p) { return p[1] - std::sin(p[0]); }},
                                          2, DomainBox::uniform(2)),
                     {vec({0, 0})},
                     KnownImplicit{"g(x) = sin(x)", split2,
                                   [](const Vector& x) { return vec({std::sin(x[0])}); }},
                     ConvexityClass::convex_in_y});

  entries.push_back({"TWO_WELLS",
                     build_residual_merit({[](const Vector& p) { return p[0] * p[0] - 1.0; },
                                           [](const Vector& p) { return p[1] - p[0]; }},
                                          2, DomainBox::uniform(2)),
                     {vec({-1, -1}), vec({1, 1})},
                     KnownImplicit{"g(x) = x", split2, [](const Vector& x) { return vec({x[0]}); }},
                     ConvexityClass::two_minima});

  entries.push_back(
      {"DEGEN_LINE",
       build_residual_merit({R([](const Vector& p) { return p[0] + p[1] - 2.0; })}, 2,
                            DomainBox::uniform(2)),
       {},
       KnownImplicit{"g(x) = 2 - x", split2, [](const Vector& x) { return vec({2.0 - x[0]}); }},
       ConvexityClass::degenerate_valley});

  // (x + y - 2)^2 + 1e-8 x^2: the valley tilted just enough to have an isolated minimum.
  entries.push_back(
      {"DEGEN_LINE_PERTURBED",
       build_residual_merit({[](const Vector& p) { return p[0] + p[1] - 2.0; },
                             [](const Vector& p) { return 1e-4 * p[0]; }},
                            2, DomainBox::uniform(2)),
       {vec({0, 2})},
       KnownImplicit{"g(x) = 2 - x", split2, [](const Vector& x) { return vec({2.0 - x[0]}); }},
       ConvexityClass::degenerate_valley});

  {
    PartiallyLinearModel model;
    model.basis = {BasisTerm{BasisTerm::Kind::exponential, 0, 0, 1.0}.to_map()};
    model.samples = exp_fit_samples();
    model.nonlinear_dim = 1;
    const auto samples = model.samples;
    entries.push_back(
        {"EXP_FIT",
         build_partially_linear(std::move(model), DomainBox({{-2.0, 1.0}, {-10.0, 10.0}})),
         {vec({-0.5, 2.0})},
         KnownImplicit{"g(x) = sum_k d_k e^{x t_k} / sum_k e^{2 x t_k}", split2,
                       [samples](const Vector& x) {
                         double num = 0.0;
                         double den = 0.0;
                         for (const auto& s : samples) {
                           const double e = std::exp(x[0] * s.t);
                           num += s.d * e;
                           den += e * e;
                         }
                         return vec({num / den});
                       }},
         ConvexityClass::convex_in_y});
  }

  entries.push_back({"NEG_Y",
                     MeritFunction::general(
                         2, [](const Vector& p) { return p[0] * p[0] - p[1] * p[1]; },
                         DomainBox::uniform(2)),
                     {},
                     std::nullopt,
                     ConvexityClass::indefinite});

  return entries;
}

}  // namespace

std::vector<Sample> exp_fit_samples() {
  std::vector<Sample> samples;
  for (int k = 0; k < 10; ++k) {
    const double t = k;
    samples.push_back({t, 2.0 * std::exp(-0.5 * t)});
  }
  return samples;
}

const std::vector<ProblemCatalogEntry>& catalog() {
  static const std::vector<ProblemCatalogEntry> entries = build_catalog();
  return entries;
}

const ProblemCatalogEntry& catalog_entry(const std::string& name) {
  for (const auto& e : catalog()) {
    if (e.name == name) return e;
  }
  throw InvalidArgument("unknown catalog problem '" + name + "'");
}

}  // namespace hlsq
