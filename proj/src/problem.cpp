#include "hlsq/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hlsq/errors.hpp"

namespace hlsq {

DomainBox::DomainBox(std::vector<Interval> bounds) : bounds_(std::move(bounds)) {
  for (std::size_t i = 0; i < bounds_.size(); ++i) {
    const auto& b = bounds_[i];
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.lo < b.hi)) {
      std::ostringstream os;
      os << "domain box coordinate " << i << " must satisfy finite lo < hi, got [" << b.lo << ", "
         << b.hi << "]";
      throw InvalidArgument(os.str());
    }
  }
}

DomainBox DomainBox::uniform(int dimension, double lo, double hi) {
  return DomainBox(std::vector<Interval>(static_cast<std::size_t>(dimension), Interval{lo, hi}));
}

bool DomainBox::contains(const Vector& p) const {
  if (p.size() != dimension()) return false;
  for (int i = 0; i < dimension(); ++i) {
    if (!(*this)[i].contains(p[i])) return false;
  }
  return true;
}

Vector DomainBox::clamp(const Vector& p) const {
  Vector q = p;
  for (int i = 0; i < dimension(); ++i) q[i] = std::clamp(q[i], (*this)[i].lo, (*this)[i].hi);
  return q;
}

Vector DomainBox::center() const {
  Vector c(dimension());
  for (int i = 0; i < dimension(); ++i) c[i] = (*this)[i].center();
  return c;
}

Vector DomainBox::lower() const {
  Vector v(dimension());
  for (int i = 0; i < dimension(); ++i) v[i] = (*this)[i].lo;
  return v;
}

Vector DomainBox::upper() const {
  Vector v(dimension());
  for (int i = 0; i < dimension(); ++i) v[i] = (*this)[i].hi;
  return v;
}

double DomainBox::diagonal() const { return (upper() - lower()).norm(); }

DomainBox DomainBox::restrict_to(const std::vector<int>& indices) const {
  std::vector<Interval> sub;
  sub.reserve(indices.size());
  for (int i : indices) sub.push_back((*this)[i]);
  return DomainBox(std::move(sub));
}

ParameterSplit::ParameterSplit(std::vector<int> x_indices, std::vector<int> y_indices)
    : x_(std::move(x_indices)), y_(std::move(y_indices)) {
  if (x_.empty() || y_.empty()) {
    throw InvalidArgument("parameter split needs at least one x and one y coordinate");
  }
  const int total = n() + m();
  std::vector<int> seen(static_cast<std::size_t>(total), 0);
  for (int i : x_) {
    if (i < 0 || i >= total) throw InvalidArgument("split index out of range: " + std::to_string(i));
    ++seen[static_cast<std::size_t>(i)];
  }
  for (int i : y_) {
    if (i < 0 || i >= total) throw InvalidArgument("split index out of range: " + std::to_string(i));
    ++seen[static_cast<std::size_t>(i)];
  }
  if (std::any_of(seen.begin(), seen.end(), [](int c) { return c != 1; })) {
    throw InvalidArgument("x and y indices must be disjoint and cover 0..M-1");
  }
}

ParameterSplit ParameterSplit::single(int index, int dimension) { return from_x({index}, dimension); }

ParameterSplit ParameterSplit::from_x(std::vector<int> x_indices, int dimension) {
  std::vector<int> y;
  for (int i = 0; i < dimension; ++i) {
    if (std::find(x_indices.begin(), x_indices.end(), i) == x_indices.end()) y.push_back(i);
  }
  return ParameterSplit(std::move(x_indices), std::move(y));
}

Vector ParameterSplit::gather_x(const Vector& p) const {
  Vector x(n());
  for (int k = 0; k < n(); ++k) x[k] = p[x_[static_cast<std::size_t>(k)]];
  return x;
}

Vector ParameterSplit::gather_y(const Vector& p) const {
  Vector y(m());
  for (int k = 0; k < m(); ++k) y[k] = p[y_[static_cast<std::size_t>(k)]];
  return y;
}

ParameterVector ParameterSplit::assemble(const Vector& x, const Vector& y) const {
  ParameterVector p(dimension());
  for (int k = 0; k < n(); ++k) p[x_[static_cast<std::size_t>(k)]] = x[k];
  for (int k = 0; k < m(); ++k) p[y_[static_cast<std::size_t>(k)]] = y[k];
  return p;
}

BasisMap BasisTerm::to_map() const {
  const double s = scale;
  switch (kind) {
    case Kind::constant:
      return [s](double, const Vector&) { return s; };
    case Kind::polynomial: {
      const int d = degree;
      return [s, d](double t, const Vector&) { return s * std::pow(t, d); };
    }
    case Kind::exponential: {
      const int i = x_index;
      return [s, i](double t, const Vector& x) { return s * std::exp(x[i] * t); };
    }
    case Kind::sine: {
      const int i = x_index;
      return [s, i](double t, const Vector& x) { return s * std::sin(x[i] * t); };
    }
    case Kind::cosine: {
      const int i = x_index;
      return [s, i](double t, const Vector& x) { return s * std::cos(x[i] * t); };
    }
  }
  return {};
}

std::string BasisTerm::describe() const {
  std::ostringstream os;
  if (scale != 1.0) os << scale << "*";
  switch (kind) {
    case Kind::constant: os << "1"; break;
    case Kind::polynomial: os << "t^" << degree; break;
    case Kind::exponential: os << "exp(x" << x_index << "*t)"; break;
    case Kind::sine: os << "sin(x" << x_index << "*t)"; break;
    case Kind::cosine: os << "cos(x" << x_index << "*t)"; break;
  }
  return os.str();
}

Matrix PartiallyLinearModel::design_matrix(const Vector& x) const {
  Matrix phi(static_cast<Eigen::Index>(samples.size()), linear_dim());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    for (int j = 0; j < linear_dim(); ++j) {
      phi(static_cast<Eigen::Index>(k), j) = basis[static_cast<std::size_t>(j)](samples[k].t, x);
    }
  }
  return phi;
}

Vector PartiallyLinearModel::rhs(const Vector& x) const {
  Vector b(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double psi = offset ? offset(samples[k].t, x) : 0.0;
    b[static_cast<Eigen::Index>(k)] = samples[k].d - psi;
  }
  return b;
}

Vector PartiallyLinearModel::residuals(const Vector& x, const Vector& y) const {
  return design_matrix(x) * y - rhs(x);
}

struct MeritFunction::State {
  int dimension = 0;
  Evaluator evaluate;
  DomainBox box;
  Structure structure = Structure::general;
  std::vector<Residual> residuals;
  std::shared_ptr<const PartiallyLinearModel> model;
};

MeritFunction::MeritFunction(std::shared_ptr<const State> state) : state_(std::move(state)) {}

MeritFunction MeritFunction::general(int dimension, Evaluator evaluate, DomainBox box) {
  if (dimension < 2) throw InvalidArgument("merit function dimension must be at least 2");
  if (box.dimension() != dimension) throw InvalidArgument("domain box dimension does not match");
  if (!evaluate) throw InvalidArgument("merit function needs an evaluator");
  auto s = std::make_shared<State>();
  s->dimension = dimension;
  s->evaluate = std::move(evaluate);
  s->box = std::move(box);
  return MeritFunction(std::move(s));
}

int MeritFunction::dimension() const { return state_->dimension; }
const DomainBox& MeritFunction::box() const { return state_->box; }
Structure MeritFunction::structure() const { return state_->structure; }
double MeritFunction::operator()(const Vector& p) const { return state_->evaluate(p); }
const std::vector<MeritFunction::Residual>& MeritFunction::residuals() const {
  return state_->residuals;
}
const PartiallyLinearModel* MeritFunction::partially_linear_model() const {
  return state_->model.get();
}

MeritFunction MeritFunction::with_box(DomainBox box) const {
  if (box.dimension() != dimension()) throw InvalidArgument("domain box dimension does not match");
  auto s = std::make_shared<State>(*state_);
  s->box = std::move(box);
  return MeritFunction(std::move(s));
}

std::optional<ParameterSplit> MeritFunction::natural_split() const {
  const auto* model = partially_linear_model();
  if (model == nullptr) return std::nullopt;
  std::vector<int> x(static_cast<std::size_t>(model->nonlinear_dim));
  std::iota(x.begin(), x.end(), 0);
  return ParameterSplit::from_x(std::move(x), model->dimension());
}

MeritFunction build_residual_merit(std::vector<MeritFunction::Residual> residuals, int dimension,
                                   DomainBox box) {
  if (residuals.empty()) {
    throw InvalidArgument("a residual merit function needs at least one residual map");
  }
  if (dimension < 2) throw InvalidArgument("merit function dimension must be at least 2");
  if (box.dimension() != dimension) throw InvalidArgument("domain box dimension does not match");
  auto s = std::make_shared<MeritFunction::State>();
  s->dimension = dimension;
  s->box = std::move(box);
  s->structure = Structure::residual;
  s->residuals = std::move(residuals);
  s->evaluate = [rs = s->residuals](const Vector& p) {
    double sum = 0.0;
    for (const auto& r : rs) {
      const double v = r(p);
      sum += v * v;
    }
    return sum;
  };
  return MeritFunction(std::move(s));
}

MeritFunction build_partially_linear(PartiallyLinearModel model, DomainBox box) {
  if (model.nonlinear_dim < 1) {
    throw InvalidArgument("a partially linear model needs at least one nonlinear parameter");
  }
  if (model.basis.empty()) throw InvalidArgument("a partially linear model needs basis functions");
  if (static_cast<int>(model.samples.size()) < model.linear_dim()) {
    throw InvalidArgument("partially linear model has " + std::to_string(model.samples.size()) +
                          " samples but " + std::to_string(model.linear_dim()) +
                          " basis functions; need at least as many samples");
  }
  const int dimension = model.dimension();
  if (box.dimension() != dimension) throw InvalidArgument("domain box dimension does not match");

  auto shared = std::make_shared<const PartiallyLinearModel>(std::move(model));
  auto s = std::make_shared<MeritFunction::State>();
  s->dimension = dimension;
  s->box = std::move(box);
  s->structure = Structure::partially_linear;
  s->model = shared;

  const int n = shared->nonlinear_dim;
  const int J = shared->linear_dim();
  for (std::size_t k = 0; k < shared->samples.size(); ++k) {
    s->residuals.emplace_back([shared, k, n, J](const Vector& p) {
      const Vector x = p.head(n);
      const auto& sample = shared->samples[k];
      double v = shared->offset ? shared->offset(sample.t, x) : 0.0;
      for (int j = 0; j < J; ++j) v += p[n + j] * shared->basis[static_cast<std::size_t>(j)](sample.t, x);
      return v - sample.d;
    });
  }
  s->evaluate = [shared, n, J](const Vector& p) {
    const Vector x = p.head(n);
    const Vector y = p.segment(n, J);
    return shared->residuals(x, y).squaredNorm();
  };
  return MeritFunction(std::move(s));
}

const char* to_string(ConvexityClass c) {
  switch (c) {
    case ConvexityClass::strictly_convex: return "strictly_convex";
    case ConvexityClass::convex_in_y: return "convex_in_y";
    case ConvexityClass::two_minima: return "two_minima";
    case ConvexityClass::degenerate_valley: return "degenerate_valley";
    case ConvexityClass::indefinite: return "indefinite";
  }
  return "unknown";
}

}  // namespace hlsq
