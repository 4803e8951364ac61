#include "figopt/model.hpp"

#include "figopt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace figopt {

namespace {

void require_length(const Vector& v, int expected, const char* what) {
  if (v.size() != expected) {
    throw InputError(std::string(what) + " has length " + std::to_string(v.size()) +
                     ", expected " + std::to_string(expected));
  }
}

// x^u by repeated multiplication so that (-x)^u == +-(x^u) bit for bit.
double int_pow(double x, int u) {
  double result = 1.0;
  for (int i = 0; i < u; ++i) result *= x;
  return result;
}

// exp(-|eta|) / (1 + exp(-|eta|))^2 == mu (1 - mu) without cancellation.
double logistic_variance(double eta) {
  const double s = std::exp(-std::abs(eta));
  return s / ((1.0 + s) * (1.0 + s));
}

double logistic_mean(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

void check_compartmental(const Vector& theta) {
  if (!(theta(1) > theta(0))) {
    throw DomainError("compartmental model requires theta2 > theta1 (got theta1=" +
                      std::to_string(theta(0)) + ", theta2=" + std::to_string(theta(1)) + ")");
  }
}

}  // namespace

DesignSpace::DesignSpace(std::vector<Bound> bounds) : bounds_(std::move(bounds)) {
  if (bounds_.empty()) throw InputError("design space needs at least one controllable variable");
  for (std::size_t r = 0; r < bounds_.size(); ++r) {
    const auto& b = bounds_[r];
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.lo < b.hi)) {
      throw InputError("bound " + std::to_string(r + 1) + " must satisfy lo < hi");
    }
  }
}

bool DesignSpace::contains(const ControlPoint& d) const {
  if (d.size() != k()) return false;
  for (int r = 0; r < k(); ++r) {
    if (d(r) < bound(r).lo || d(r) > bound(r).hi) return false;
  }
  return true;
}

ControlPoint DesignSpace::project(const ControlPoint& d) const {
  require_length(d, k(), "control point");
  ControlPoint out(d.size());
  for (int r = 0; r < k(); ++r) out(r) = std::clamp(d(r), bound(r).lo, bound(r).hi);
  return out;
}

double DesignSpace::scaled_distance(const ControlPoint& a, const ControlPoint& b) const {
  require_length(a, k(), "control point");
  require_length(b, k(), "control point");
  double sum = 0.0;
  for (int r = 0; r < k(); ++r) {
    const double z = (a(r) - b(r)) / width(r);
    sum += z * z;
  }
  return std::sqrt(sum);
}

Design::Design(std::vector<ControlPoint> points) : points_(std::move(points)) {
  if (points_.empty()) throw InputError("a design needs at least one run");
  const auto k = points_.front().size();
  if (k < 1) throw InputError("control points must have at least one coordinate");
  for (const auto& d : points_) {
    if (d.size() != k) throw InputError("all design points must share the same dimension");
  }
}

Design Design::replicate(const ControlPoint& d, int n) {
  if (n < 1) throw InputError("a design needs at least one run");
  return Design(std::vector<ControlPoint>(static_cast<std::size_t>(n), d));
}

RegressionSpec::RegressionSpec(Eigen::MatrixXi exponents) : exponents_(std::move(exponents)) {
  if (exponents_.rows() < 1 || exponents_.cols() < 1) {
    throw InputError("exponent matrix must be k x p with k >= 1 and p >= 1");
  }
  if ((exponents_.array() < 0).any()) throw InputError("exponents must be non-negative");
  std::set<std::vector<int>> seen;
  for (int j = 0; j < p(); ++j) {
    std::vector<int> column(exponents_.col(j).data(), exponents_.col(j).data() + k());
    if (!seen.insert(column).second) {
      throw InputError("exponent matrix column " + std::to_string(j + 1) + " duplicates an earlier column");
    }
  }
}

RegressionSpec RegressionSpec::intercept_only(int k) {
  return RegressionSpec(Eigen::MatrixXi::Zero(k, 1));
}

RegressionSpec RegressionSpec::first_order(int k) {
  Eigen::MatrixXi u = Eigen::MatrixXi::Zero(k, k + 1);
  for (int r = 0; r < k; ++r) u(r, r + 1) = 1;
  return RegressionSpec(std::move(u));
}

RegressionSpec RegressionSpec::full_second_order(int k) {
  const int p = 1 + 2 * k + k * (k - 1) / 2;
  Eigen::MatrixXi u = Eigen::MatrixXi::Zero(k, p);
  int j = 1;
  for (int r = 0; r < k; ++r) u(r, j++) = 1;
  for (int r = 0; r < k; ++r) u(r, j++) = 2;
  for (int r = 0; r < k; ++r) {
    for (int s = r + 1; s < k; ++s) {
      u(r, j) = 1;
      u(s, j) = 1;
      ++j;
    }
  }
  return RegressionSpec(std::move(u));
}

void validate_scale(const ScaleSpec& scale) {
  if (const auto* known = std::get_if<KnownScale>(&scale)) {
    if (!(known->gamma > 0.0) || !std::isfinite(known->gamma)) {
      throw InputError("known scale gamma must be positive");
    }
  } else if (const auto* ig = std::get_if<NuisanceIG>(&scale)) {
    if (!(ig->s1 > 0.0) || !(ig->s2 > 0.0) || !std::isfinite(ig->s1) || !std::isfinite(ig->s2)) {
      throw InputError("inverse-gamma scale hyperparameters s1, s2 must be positive");
    }
  }
}

const char* family_name(Family family) {
  switch (family) {
    case Family::NormalLinear: return "normal_linear";
    case Family::PoissonGLM: return "poisson";
    case Family::LogisticGLM: return "logistic";
    case Family::CompartmentalNormal: return "compartmental";
  }
  return "unknown";
}

ModelSpec::ModelSpec(Family family, std::optional<RegressionSpec> regression, ScaleSpec scale)
    : family_(family), regression_(std::move(regression)), scale_(scale) {
  validate_scale(scale_);
}

ModelSpec ModelSpec::normal_linear(RegressionSpec regression, ScaleSpec scale) {
  return ModelSpec(Family::NormalLinear, std::move(regression), scale);
}

ModelSpec ModelSpec::poisson(RegressionSpec regression) {
  return ModelSpec(Family::PoissonGLM, std::move(regression), KnownScale{1.0});
}

ModelSpec ModelSpec::logistic(RegressionSpec regression) {
  return ModelSpec(Family::LogisticGLM, std::move(regression), KnownScale{1.0});
}

ModelSpec ModelSpec::compartmental(ScaleSpec scale) {
  return ModelSpec(Family::CompartmentalNormal, std::nullopt, scale);
}

int ModelSpec::p() const { return regression_ ? regression_->p() : 3; }
int ModelSpec::k() const { return regression_ ? regression_->k() : 1; }

Vector eval_regression(const RegressionSpec& spec, const ControlPoint& d) {
  require_length(d, spec.k(), "control point");
  Vector f(spec.p());
  for (int j = 0; j < spec.p(); ++j) {
    double term = 1.0;
    for (int r = 0; r < spec.k(); ++r) term *= int_pow(d(r), spec.exponent(r, j));
    f(j) = term;
  }
  return f;
}

double mean(const ModelSpec& model, const Vector& theta, const ControlPoint& d) {
  require_length(theta, model.p(), "theta");
  require_length(d, model.k(), "control point");
  switch (model.family()) {
    case Family::NormalLinear:
      return eval_regression(*model.regression(), d).dot(theta);
    case Family::PoissonGLM:
      return std::exp(eval_regression(*model.regression(), d).dot(theta));
    case Family::LogisticGLM:
      return logistic_mean(eval_regression(*model.regression(), d).dot(theta));
    case Family::CompartmentalNormal:
      check_compartmental(theta);
      return theta(2) * (std::exp(-theta(0) * d(0)) - std::exp(-theta(1) * d(0)));
  }
  return 0.0;
}

Vector mean_gradient(const ModelSpec& model, const Vector& theta, const ControlPoint& d) {
  require_length(theta, model.p(), "theta");
  require_length(d, model.k(), "control point");
  switch (model.family()) {
    case Family::NormalLinear:
      return eval_regression(*model.regression(), d);
    case Family::PoissonGLM: {
      Vector f = eval_regression(*model.regression(), d);
      return std::exp(f.dot(theta)) * f;
    }
    case Family::LogisticGLM: {
      Vector f = eval_regression(*model.regression(), d);
      return logistic_variance(f.dot(theta)) * f;
    }
    case Family::CompartmentalNormal: {
      check_compartmental(theta);
      const double t = d(0);
      const double e1 = std::exp(-theta(0) * t);
      const double e2 = std::exp(-theta(1) * t);
      Vector g(3);
      g << -theta(2) * t * e1, theta(2) * t * e2, e1 - e2;
      return g;
    }
  }
  return {};
}

double variance(const ModelSpec& model, const Vector& theta, const ControlPoint& d, double gamma) {
  if (!(gamma > 0.0)) throw InputError("scale gamma must be positive");
  switch (model.family()) {
    case Family::NormalLinear:
    case Family::CompartmentalNormal:
      require_length(theta, model.p(), "theta");
      require_length(d, model.k(), "control point");
      if (model.family() == Family::CompartmentalNormal) check_compartmental(theta);
      return gamma;
    case Family::PoissonGLM:
      return mean(model, theta, d);
    case Family::LogisticGLM: {
      require_length(theta, model.p(), "theta");
      const double v = logistic_variance(eval_regression(*model.regression(), d).dot(theta));
      if (!(v > 0.0)) {
        throw DomainError("degenerate Bernoulli variance: mean is numerically 0 or 1");
      }
      return v;
    }
  }
  return 0.0;
}

Matrix build_M(const ModelSpec& model, const Vector& theta, const Design& design) {
  Matrix m(design.n(), model.p());
  for (int i = 0; i < design.n(); ++i) m.row(i) = mean_gradient(model, theta, design[i]).transpose();
  return m;
}

Matrix fisher_information(const ModelSpec& model, const Vector& theta, const Design& design,
                          double gamma) {
  const Matrix m = build_M(model, theta, design);
  Vector w(design.n());
  for (int i = 0; i < design.n(); ++i) w(i) = 1.0 / variance(model, theta, design[i], gamma);
  Matrix info = m.transpose() * w.asDiagonal() * m;
  // Symmetrise away rounding asymmetry from the triple product.
  return 0.5 * (info + info.transpose());
}

}  // namespace figopt
