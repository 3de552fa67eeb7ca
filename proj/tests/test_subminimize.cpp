#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hlsq/errors.hpp"
#include "hlsq/numerics.hpp"
#include "hlsq/subminimize.hpp"

using namespace hlsq;

namespace {

const ParameterSplit kSplit = ParameterSplit::single(0, 2);

Vector one(double v) { return Vector::Constant(1, v); }

SliceProblem slice(const std::string& name, double x) { return {catalog_entry(name).merit, kSplit, one(x)}; }

}  // namespace

TEST(ConvexityProbe, SineValleyPositive) {
  const auto c = probe_y_convexity(catalog_entry("SINE_VALLEY").merit, kSplit, 7);
  EXPECT_TRUE(c.positive());
  EXPECT_NEAR(c.min_eig_over_samples, 2.0, 1e-4);
  EXPECT_EQ(c.sampled_points, 49);
  EXPECT_FALSE(c.witness.has_value());
}

TEST(ConvexityProbe, DegenLineIsConvexInY) {
  const auto c = probe_y_convexity(catalog_entry("DEGEN_LINE").merit, kSplit);
  EXPECT_TRUE(c.positive());
  EXPECT_NEAR(c.min_eig_over_samples, 2.0, 1e-4);
  EXPECT_FALSE(probe_full_convexity(catalog_entry("DEGEN_LINE").merit).positive());
}

TEST(ConvexityProbe, NegYViolatedWithWitness) {
  const auto c = probe_y_convexity(catalog_entry("NEG_Y").merit, kSplit);
  EXPECT_FALSE(c.positive());
  ASSERT_TRUE(c.witness.has_value());
  EXPECT_LE(c.witness_eig, 0.0);
  try {
    require_positive(c);
    FAIL();
  } catch (const ConvexityViolation& e) {
    EXPECT_EQ(e.witness(), *c.witness);
    EXPECT_NEAR(e.min_eigenvalue(), -2.0, 1e-4);
  }
}

TEST(ConvexityProbe, PartiallyLinearSamplesXGridOnly) {
  const auto c = probe_y_convexity(catalog_entry("EXP_FIT").merit, kSplit, 9);
  EXPECT_TRUE(c.positive());
  EXPECT_EQ(c.sampled_points, 9);
}

TEST(ConvexityProbe, RejectsCoarseDensity) {
  EXPECT_THROW(probe_y_convexity(catalog_entry("QUAD").merit, kSplit, 2), InvalidArgument);
  EXPECT_EQ(default_probe_density(4), 21);
  EXPECT_EQ(default_probe_density(5), 7);
  EXPECT_EQ(default_probe_density(9), 3);
}

TEST(SubminimizeLinear, ExpFitAtGeneratingX) {
  const auto s = subminimize_linear(slice("EXP_FIT", -0.5));
  EXPECT_EQ(s.method, SubMethod::linear_elimination);
  EXPECT_NEAR(s.y_star[0], 2.0, 1e-12);
  EXPECT_NEAR(s.value, 0.0, 1e-24);
  EXPECT_LE(s.grad_y_norm, 1e-8);
  EXPECT_GT(s.y_hessian_min_eig, 0.0);
}

TEST(SubminimizeLinear, ExpFitAtZeroIsTheMean) {
  double mean = 0.0;
  for (const auto& s : exp_fit_samples()) mean += s.d / 10.0;
  EXPECT_NEAR(subminimize_linear(slice("EXP_FIT", 0.0)).y_star[0], mean, 1e-14);
}

TEST(SubminimizeLinear, RejectsOtherStructures) {
  EXPECT_THROW(subminimize_linear(slice("QUAD", 0.0)), InvalidArgument);
  EXPECT_FALSE(supports_linear_elimination(catalog_entry("QUAD").merit, kSplit));
  EXPECT_FALSE(supports_linear_elimination(catalog_entry("EXP_FIT").merit, ParameterSplit::single(1, 2)));
}

TEST(SubminimizeLinear, RankDeficientDesign) {
  PartiallyLinearModel m;
  m.basis = {BasisTerm{BasisTerm::Kind::constant}.to_map(), BasisTerm{BasisTerm::Kind::sine, 0, 0}.to_map()};
  m.samples = exp_fit_samples();
  m.nonlinear_dim = 1;
  const auto f = build_partially_linear(m, DomainBox::uniform(3));
  // sin(0 * t) is identically zero.
  try {
    subminimize_linear({f, *f.natural_split(), one(0.0)});
    FAIL();
  } catch (const RankDeficientError& e) {
    EXPECT_EQ(e.rank(), 1);
  }
}

TEST(SubminimizeNewton, ReferenceExamples) {
  const auto a = subminimize_newton(slice("SINE_VALLEY", 1.0), one(0.0));
  EXPECT_NEAR(a.y_star[0], std::sin(1.0), 1e-8);
  const auto b = subminimize_newton(slice("QUAD", 3.0), one(5.0));
  EXPECT_NEAR(b.y_star[0], 0.0, 1e-8);
  EXPECT_NEAR(b.value, 9.0, 1e-12);
  const auto c = subminimize_newton(slice("TWO_WELLS", 0.5), one(-2.0));
  EXPECT_NEAR(c.y_star[0], 0.5, 1e-8);
  EXPECT_NEAR(c.value, 0.5625, 1e-12);
  for (const auto& s : {a, b, c}) {
    EXPECT_EQ(s.method, SubMethod::newton);
    EXPECT_LE(s.grad_y_norm, s.inner_tol);
    EXPECT_EQ(s.y_negative_count, 0);
  }
}

TEST(SubminimizeNewton, MultiDimensionalY) {
  const auto& f = catalog_entry("ANISO_QUAD3").merit;
  const auto s = subminimize_newton({f, ParameterSplit::single(0, 3), one(1.0)}, Vector::Constant(2, 3.0));
  const Vector expected = catalog_entry("ANISO_QUAD3").known_implicit->g(one(1.0));
  EXPECT_LE((s.y_star - expected).lpNorm<Eigen::Infinity>(), 1e-8);
}

TEST(SubminimizeNewton, RefusesIndefiniteSlice) {
  EXPECT_THROW(subminimize_newton(slice("NEG_Y", 0.0), one(1.0)), ConvexityViolation);
}

TEST(SubminimizeNewton, IterationCapCarriesBestIterate) {
  try {
    // Quartic in y, so two Newton steps from y = 5 cannot reach the tolerance.
    const auto f = MeritFunction::general(
        2, [](const Vector& p) { return p[0] * p[0] + std::pow(p[1], 4) + p[1] * p[1]; }, DomainBox::uniform(2));
    subminimize_newton(SliceProblem{f, ParameterSplit::single(0, 2), one(1.0)}, one(5.0), 1e-30, 2);
    FAIL();
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.best_iterate().size(), 2);
    EXPECT_GE(e.gradient_norm(), 0.0);
  }
}

TEST(SubminimizeNewton, IteratesStayInBox) {
  // Unconstrained slice minimum y = sin(x) is inside; start on the boundary.
  const auto s = subminimize_newton(slice("SINE_VALLEY", 2.0), one(10.0));
  EXPECT_NEAR(s.y_star[0], std::sin(2.0), 1e-8);
}

// Property: the sub-minimum beats 200 random y in the box.
TEST(SubminimizeProperty, ConditionalMinimality) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (const std::string name : {"QUAD", "SINE_VALLEY", "TWO_WELLS", "DEGEN_LINE", "EXP_FIT"}) {
    const auto& f = catalog_entry(name).merit;
    const auto& xb = f.box()[0];
    for (int trial = 0; trial < 5; ++trial) {
      const double x = xb.lo + (u(rng) + 10.0) / 20.0 * xb.width();
      const auto s = subminimize({f, kSplit, one(x)});
      for (int k = 0; k < 200; ++k) {
        const double y = u(rng);
        EXPECT_LE(s.value, f((Vector(2) << x, y).finished())) << name << " x=" << x << " y=" << y;
      }
    }
  }
}

// Property: the stored gradient norm is reproduced by an independent stencil call.
TEST(SubminimizeProperty, CertificateSoundness) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (const std::string name : {"QUAD", "SINE_VALLEY", "TWO_WELLS"}) {
    const auto& f = catalog_entry(name).merit;
    for (int trial = 0; trial < 20; ++trial) {
      const double x = u(rng);
      const auto s = subminimize_newton({f, kSplit, one(x)}, one(u(rng)));
      const double g = fd_gradient(f, (Vector(2) << x, s.y_star[0]).finished(), {1}).values.norm();
      EXPECT_LE(std::abs(g - s.grad_y_norm), 10 * s.inner_tol) << name;
    }
  }
}

TEST(SubminimizeProperty, NewtonAgreesWithLinearElimination) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> y0(-10.0, 10.0);
  const auto& f = catalog_entry("EXP_FIT").merit;
  for (double x : {-1.5, -0.5, 0.0, 0.5}) {
    const auto lin = subminimize_linear({f, kSplit, one(x)});
    for (int k = 0; k < 10; ++k) {
      const auto nt = subminimize_newton({f, kSplit, one(x)}, one(y0(rng)));
      EXPECT_NEAR(nt.y_star[0], lin.y_star[0], 1e-6) << "x=" << x;
    }
  }
}
