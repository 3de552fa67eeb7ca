#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace hlsq {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A point p in R^M. Entries are in model-parameter units.
using ParameterVector = Eigen::VectorXd;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  double center() const { return 0.5 * (lo + hi); }
  bool contains(double v) const { return v >= lo && v <= hi; }
};

/// Closed per-coordinate bounds. Every merit function carries one.
class DomainBox {
 public:
  DomainBox() = default;
  explicit DomainBox(std::vector<Interval> bounds);

  /// [lo, hi]^M.
  static DomainBox uniform(int dimension, double lo = -10.0, double hi = 10.0);

  int dimension() const { return static_cast<int>(bounds_.size()); }
  const Interval& operator[](int i) const { return bounds_[static_cast<std::size_t>(i)]; }
  const std::vector<Interval>& bounds() const { return bounds_; }

  bool contains(const Vector& p) const;
  Vector clamp(const Vector& p) const;
  Vector center() const;
  Vector lower() const;
  Vector upper() const;
  double diagonal() const;

  /// The box restricted to a subset of coordinates, in the given order.
  DomainBox restrict_to(const std::vector<int>& indices) const;

 private:
  std::vector<Interval> bounds_;
};

/// Direct-sum decomposition p = (x, y) by disjoint index sets.
class ParameterSplit {
 public:
  /// Throws InvalidArgument unless the two sets partition {0..M-1} and both
  /// are non-empty.
  ParameterSplit(std::vector<int> x_indices, std::vector<int> y_indices);

  /// x = {index}, y = every other coordinate in increasing order.
  static ParameterSplit single(int index, int dimension);
  /// x = the given set, y = the complement.
  static ParameterSplit from_x(std::vector<int> x_indices, int dimension);

  const std::vector<int>& x_indices() const { return x_; }
  const std::vector<int>& y_indices() const { return y_; }
  int n() const { return static_cast<int>(x_.size()); }
  int m() const { return static_cast<int>(y_.size()); }
  int dimension() const { return n() + m(); }

  Vector gather_x(const Vector& p) const;
  Vector gather_y(const Vector& p) const;
  ParameterVector assemble(const Vector& x, const Vector& y) const;

  bool operator==(const ParameterSplit&) const = default;

 private:
  std::vector<int> x_;
  std::vector<int> y_;
};

struct Sample {
  double t = 0.0;
  double d = 0.0;
};

/// phi(t; x): one column of the design matrix of a partially linear model.
using BasisMap = std::function<double(double t, const Vector& x)>;

/// Declarative basis term from the fixed expression set used by problem files.
struct BasisTerm {
  enum class Kind { constant, polynomial, exponential, sine, cosine };

  Kind kind = Kind::constant;
  int degree = 0;   // polynomial: t^degree
  int x_index = 0;  // exponential / sine / cosine: which nonlinear parameter
  double scale = 1.0;

  BasisMap to_map() const;
  std::string describe() const;
};

/// Model value sum_j y_j phi_j(t; x) + psi(t; x), fitted against samples (t_k, d_k).
/// The parameter vector is laid out as p = (x_0..x_{n-1}, y_0..y_{J-1}).
struct PartiallyLinearModel {
  std::vector<BasisMap> basis;
  BasisMap offset;  // empty means psi = 0
  std::vector<Sample> samples;
  int nonlinear_dim = 0;

  int linear_dim() const { return static_cast<int>(basis.size()); }
  int dimension() const { return nonlinear_dim + linear_dim(); }

  /// Phi_{kj} = phi_j(t_k; x).
  Matrix design_matrix(const Vector& x) const;
  /// b_k = d_k - psi(t_k; x).
  Vector rhs(const Vector& x) const;
  /// r_k = sum_j y_j phi_j(t_k; x) + psi(t_k; x) - d_k.
  Vector residuals(const Vector& x, const Vector& y) const;
};

enum class Structure { general, residual, partially_linear };

/// Scalar field F : R^M -> R evaluated on a domain box. Copies share the
/// underlying immutable state; evaluation is pure and reentrant.
class MeritFunction {
 public:
  using Evaluator = std::function<double(const Vector&)>;
  using Residual = std::function<double(const Vector&)>;

  static MeritFunction general(int dimension, Evaluator evaluate, DomainBox box);

  int dimension() const;
  const DomainBox& box() const;
  Structure structure() const;
  double operator()(const Vector& p) const;

  /// Individual residual maps for residual and partially linear structure.
  const std::vector<Residual>& residuals() const;
  /// Non-null iff structure() == partially_linear.
  const PartiallyLinearModel* partially_linear_model() const;

  /// Same function and structure on a different box.
  MeritFunction with_box(DomainBox box) const;

  /// The split x = {0..n-1}, y = {n..M-1} of a partially linear model.
  std::optional<ParameterSplit> natural_split() const;

 private:
  struct State;
  explicit MeritFunction(std::shared_ptr<const State> state);
  std::shared_ptr<const State> state_;

  friend MeritFunction build_residual_merit(std::vector<Residual>, int, DomainBox);
  friend MeritFunction build_partially_linear(PartiallyLinearModel, DomainBox);
};

/// F(p) = sum_k r_k(p)^2.
MeritFunction build_residual_merit(std::vector<MeritFunction::Residual> residuals, int dimension,
                                   DomainBox box);

/// F(x, y) = sum_k (sum_j y_j phi_j(t_k; x) + psi(t_k; x) - d_k)^2.
MeritFunction build_partially_linear(PartiallyLinearModel model, DomainBox box);

enum class ConvexityClass { strictly_convex, convex_in_y, two_minima, degenerate_valley, indefinite };

const char* to_string(ConvexityClass c);

struct KnownImplicit {
  std::string description;
  ParameterSplit split;
  std::function<Vector(const Vector& x)> g;
};

struct ProblemCatalogEntry {
  std::string name;
  MeritFunction merit;
  std::vector<ParameterVector> known_minima;
  std::optional<KnownImplicit> known_implicit;
  ConvexityClass convexity_class;
};

/// Built-in fixtures. Immutable after first use.
const std::vector<ProblemCatalogEntry>& catalog();

/// Throws InvalidArgument for unknown names.
const ProblemCatalogEntry& catalog_entry(const std::string& name);

/// Samples of 2 exp(-0.5 t) at t = 0..9, the data behind EXP_FIT.
std::vector<Sample> exp_fit_samples();

}  // namespace hlsq
