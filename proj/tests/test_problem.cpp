#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "hlsq/errors.hpp"
#include "hlsq/numerics.hpp"
#include "hlsq/problem.hpp"
#include "hlsq/problem_file.hpp"

using namespace hlsq;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

MeritFunction shifted() {
  return build_residual_merit({[](const Vector& p) { return p[0] - 1.0; }, [](const Vector& p) { return p[1] - 2.0; }},
                              2, DomainBox::uniform(2));
}

PartiallyLinearModel exp_model() {
  PartiallyLinearModel m;
  m.basis = {BasisTerm{BasisTerm::Kind::exponential, 0, 0, 1.0}.to_map()};
  m.samples = exp_fit_samples();
  m.nonlinear_dim = 1;
  return m;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("hlsq_problem_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write(const std::filesystem::path& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST(DomainBox, RejectsInvertedBounds) {
  EXPECT_THROW(DomainBox({{1.0, 0.0}}), InvalidArgument);
  EXPECT_THROW(DomainBox({{0.0, NAN}}), InvalidArgument);
}

TEST(DomainBox, ClampContainsDiagonal) {
  const auto box = DomainBox::uniform(2, -1.0, 1.0);
  EXPECT_TRUE(box.contains(v2(1.0, -1.0)));
  EXPECT_FALSE(box.contains(v2(1.0 + 1e-12, 0.0)));
  EXPECT_EQ(box.clamp(v2(5.0, -5.0)), v2(1.0, -1.0));
  EXPECT_DOUBLE_EQ(box.diagonal(), std::sqrt(8.0));
  EXPECT_EQ(box.restrict_to({1}).dimension(), 1);
}

TEST(ParameterSplit, ValidatesPartition) {
  EXPECT_THROW(ParameterSplit({0}, {0}), InvalidArgument);
  EXPECT_THROW(ParameterSplit({0}, {2}), InvalidArgument);
  EXPECT_THROW(ParameterSplit({}, {0, 1}), InvalidArgument);
  const ParameterSplit s({2, 0}, {1});
  EXPECT_EQ(s.n(), 2);
  EXPECT_EQ(s.m(), 1);
}

TEST(ParameterSplit, GatherAssembleRoundTrip) {
  const ParameterSplit s({2, 0}, {3, 1});
  const Vector p = (Vector(4) << 10, 11, 12, 13).finished();
  EXPECT_EQ(s.gather_x(p), v2(12, 10));
  EXPECT_EQ(s.gather_y(p), v2(13, 11));
  EXPECT_EQ(s.assemble(s.gather_x(p), s.gather_y(p)), p);
  EXPECT_EQ(ParameterSplit::single(1, 3).y_indices(), (std::vector<int>{0, 2}));
}

TEST(ResidualMerit, SumOfSquares) {
  const auto f = shifted();
  EXPECT_EQ(f.structure(), Structure::residual);
  EXPECT_DOUBLE_EQ(f(v2(1, 2)), 0.0);
  EXPECT_DOUBLE_EQ(f(v2(0, 0)), 5.0);
  const auto g = build_residual_merit(
      {[](const Vector& p) { return p[1] - std::sin(p[0]); }, [](const Vector& p) { return p[0]; }}, 2,
      DomainBox::uniform(2));
  EXPECT_NEAR(g(v2(M_PI / 2, 1.0)), M_PI * M_PI / 4, 1e-15);
}

TEST(ResidualMerit, RejectsEmptyAndLowDimension) {
  EXPECT_THROW(build_residual_merit({}, 2, DomainBox::uniform(2)), InvalidArgument);
  EXPECT_THROW(build_residual_merit({[](const Vector& p) { return p[0]; }}, 1, DomainBox::uniform(1)),
               InvalidArgument);
  EXPECT_THROW(build_residual_merit({[](const Vector& p) { return p[0]; }}, 2, DomainBox::uniform(3)),
               InvalidArgument);
}

TEST(ResidualMerit, NonNegativeOnRandomSamples) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10, 10);
  for (const auto& e : catalog()) {
    if (e.merit.structure() == Structure::general) continue;
    for (int k = 0; k < 200; ++k) {
      Vector p(e.merit.dimension());
      for (int i = 0; i < p.size(); ++i) p[i] = e.merit.box()[i].lo + (u(rng) + 10) / 20 * e.merit.box()[i].width();
      EXPECT_GE(e.merit(p), 0.0) << e.name;
    }
  }
}

TEST(PartiallyLinear, ZeroAtGeneratingParameters) {
  const auto f = build_partially_linear(exp_model(), DomainBox::uniform(2));
  EXPECT_EQ(f.structure(), Structure::partially_linear);
  EXPECT_NEAR(f(v2(-0.5, 2.0)), 0.0, 1e-28);
}

TEST(PartiallyLinear, ValueAtZeroAmplitudeIsSumOfSquaredData) {
  const auto f = build_partially_linear(exp_model(), DomainBox::uniform(2));
  double expected = 0.0;
  for (int t = 0; t < 10; ++t) expected += std::pow(2.0 * std::exp(-0.5 * t), 2);
  EXPECT_NEAR(f(v2(-0.5, 0.0)), expected, 1e-14 * expected);
}

TEST(PartiallyLinear, ResidualMapsAgreeWithEvaluate) {
  const auto f = build_partially_linear(exp_model(), DomainBox::uniform(2));
  const Vector p = v2(-0.3, 1.7);
  double sum = 0.0;
  for (const auto& r : f.residuals()) sum += r(p) * r(p);
  EXPECT_NEAR(sum, f(p), 1e-13 * f(p));
}

TEST(PartiallyLinear, RejectsPureLinearAndUnderdetermined) {
  PartiallyLinearModel pure;
  pure.basis = {BasisTerm{BasisTerm::Kind::constant}.to_map(), BasisTerm{BasisTerm::Kind::polynomial, 1}.to_map()};
  pure.samples = exp_fit_samples();
  pure.nonlinear_dim = 0;
  EXPECT_THROW(build_partially_linear(pure, DomainBox::uniform(2)), InvalidArgument);

  auto few = exp_model();
  few.basis.push_back(BasisTerm{BasisTerm::Kind::constant}.to_map());
  few.samples.resize(1);
  EXPECT_THROW(build_partially_linear(few, DomainBox::uniform(3)), InvalidArgument);
}

TEST(PartiallyLinear, YHessianIndependentOfY) {
  auto model = exp_model();
  model.basis.push_back(BasisTerm{BasisTerm::Kind::constant}.to_map());
  const auto f = build_partially_linear(model, DomainBox::uniform(3));
  const ParameterSplit split = *f.natural_split();
  const auto h1 = fd_hessian(f, (Vector(3) << -0.2, 1.0, -0.5).finished(), split).y_block;
  const auto h2 = fd_hessian(f, (Vector(3) << -0.2, 4.0, 3.0).finished(), split).y_block;
  EXPECT_LE((h1 - h2).norm(), 1e-8 * h1.norm());
}

TEST(Catalog, RequiredEntriesAndClasses) {
  EXPECT_EQ(catalog_entry("QUAD").convexity_class, ConvexityClass::strictly_convex);
  EXPECT_EQ(catalog_entry("SINE_VALLEY").convexity_class, ConvexityClass::convex_in_y);
  EXPECT_EQ(catalog_entry("TWO_WELLS").convexity_class, ConvexityClass::two_minima);
  EXPECT_EQ(catalog_entry("DEGEN_LINE").convexity_class, ConvexityClass::degenerate_valley);
  EXPECT_TRUE(catalog_entry("DEGEN_LINE").known_minima.empty());
  EXPECT_EQ(catalog_entry("TWO_WELLS").known_minima.size(), 2u);
  EXPECT_EQ(catalog_entry("EXP_FIT").merit.structure(), Structure::partially_linear);
  EXPECT_THROW(catalog_entry("NOPE"), InvalidArgument);
}

TEST(Catalog, KnownImplicitFunctions) {
  const auto& sv = catalog_entry("SINE_VALLEY");
  EXPECT_NEAR(sv.known_implicit->g(Vector::Constant(1, 0.7))[0], std::sin(0.7), 1e-15);
  const auto& tw = catalog_entry("TWO_WELLS");
  for (double x : {-1.5, 0.0, 0.3}) {
    const Vector gx = tw.known_implicit->g(Vector::Constant(1, x));
    EXPECT_NEAR(tw.merit(v2(x, gx[0])), std::pow(x * x - 1, 2), 1e-14);
  }
}

TEST(Catalog, GradientVanishesAtKnownMinima) {
  for (const auto& e : catalog()) {
    for (const auto& p : e.known_minima) {
      const double scale = std::max(1.0, std::abs(e.merit(p)));
      EXPECT_LE(fd_gradient(e.merit, p).values.norm(), 1e-6 * scale) << e.name;
    }
  }
}

TEST(Catalog, ExpFitImplicitIsTheLinearLeastSquaresAmplitude) {
  const auto& e = catalog_entry("EXP_FIT");
  for (double x : {-1.5, -0.5, 0.2}) {
    const double y = e.known_implicit->g(Vector::Constant(1, x))[0];
    // One-dimensional least squares: the derivative in y vanishes.
    const double h = 1e-6;
    const double dfy = (e.merit(v2(x, y + h)) - e.merit(v2(x, y - h))) / (2 * h);
    EXPECT_NEAR(dfy, 0.0, 1e-6 * std::max(1.0, e.merit(v2(x, y))));
  }
}

TEST(DataCsv, ParsesAndRejects) {
  const auto s = parse_data_csv("t,d\n0,1.5\n1,2e-1\n\n");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_DOUBLE_EQ(s[1].d, 0.2);
  EXPECT_THROW(parse_data_csv("x,y\n0,1\n"), InvalidArgument);
  try {
    parse_data_csv("t,d\n0,1\n1;2\n", "obs.csv");
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("obs.csv:3"), std::string::npos);
  }
}

TEST(ProblemFile, CatalogKindWithSplitAndBox) {
  const auto def = parse_problem(R"({
    "dimension": 2,
    "split": {"x_indices": [1], "y_indices": [0]},
    "domain_box": [[-3, 3], [-3, 3]],
    "model": {"kind": "catalog", "name": "SINE_VALLEY"}
  })",
                                 ".");
  EXPECT_EQ(def.name, "SINE_VALLEY");
  EXPECT_EQ(def.split->x_indices(), std::vector<int>{1});
  EXPECT_DOUBLE_EQ(def.merit.box()[0].hi, 3.0);
}

TEST(ProblemFile, PartiallyLinearWithDataFile) {
  const auto dir = scratch_dir("pl");
  std::string csv = "t,d\n";
  for (int t = 0; t < 10; ++t) csv += std::to_string(t) + "," + std::to_string(3.0 * std::exp(-0.25 * t) + 1.0) + "\n";
  write(dir / "obs.csv", csv);
  write(dir / "p.json", R"({
    "dimension": 3,
    "model": {"kind": "partially_linear",
              "basis": [{"type": "exponential", "x_index": 0}, {"type": "constant"}]},
    "data_file": "obs.csv"
  })");
  const auto def = load_problem_file(dir / "p.json");
  EXPECT_EQ(def.merit.structure(), Structure::partially_linear);
  EXPECT_EQ(def.merit.natural_split()->x_indices(), std::vector<int>{0});
  EXPECT_LT(def.merit((Vector(3) << -0.25, 3.0, 1.0).finished()), 1e-10);
}

TEST(ProblemFile, OffsetTermsAreSummed) {
  const auto dir = scratch_dir("offset");
  write(dir / "obs.csv", "t,d\n0,0\n1,0\n2,0\n");
  write(dir / "p.json", R"({
    "dimension": 2,
    "model": {"kind": "partially_linear", "basis": [{"type": "constant"}],
              "offset": [{"type": "polynomial", "degree": 1, "scale": 2}, {"type": "sine", "x_index": 0}]},
    "data_file": "obs.csv"
  })");
  const auto def = load_problem_file(dir / "p.json");
  // r_k = y + 2 t + sin(x t)
  const double x = 0.3, y = -1.0;
  double expected = 0.0;
  for (int t = 0; t < 3; ++t) expected += std::pow(y + 2 * t + std::sin(x * t), 2);
  EXPECT_NEAR(def.merit(v2(x, y)), expected, 1e-13);
}

TEST(ProblemFile, SyntaxErrorNamesLine) {
  try {
    parse_problem("{\n  \"dimension\": 2,\n  \"model\": {\n}}}\n", ".");
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
}

TEST(ProblemFile, SchemaErrorsNameField) {
  auto field_of = [](const std::string& text) {
    try {
      parse_problem(text, ".");
    } catch (const InvalidArgument& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(field_of(R"({"model": {"kind": "catalog", "name": "QUAD"}})").find("'dimension'"), std::string::npos);
  EXPECT_NE(field_of(R"({"dimension": 2, "model": {"kind": "tree"}})").find("'model.kind'"), std::string::npos);
  EXPECT_NE(field_of(R"({"dimension": 3, "model": {"kind": "catalog", "name": "QUAD"}})").find("'dimension'"),
            std::string::npos);
  EXPECT_NE(field_of(R"({"dimension": 2, "domain_box": [[1, 0], [0, 1]],
                         "model": {"kind": "catalog", "name": "QUAD"}})")
                .find("'domain_box[0]'"),
            std::string::npos);
  EXPECT_NE(field_of(R"({"dimension": 2, "model": {"kind": "partially_linear",
                         "basis": [{"type": "gamma"}]}, "data_file": "x"})")
                .find("'model.basis[0].type'"),
            std::string::npos);
  EXPECT_NE(field_of(R"({"dimension": 2, "split": {"x_indices": [0], "y_indices": [0]},
                         "model": {"kind": "catalog", "name": "QUAD"}})")
                .find("'split'"),
            std::string::npos);
}

TEST(ProblemFile, ResolvePrefersCatalog) {
  EXPECT_EQ(resolve_problem("QUAD").name, "QUAD");
  EXPECT_THROW(resolve_problem("/no/such/problem.json"), InvalidArgument);
}
