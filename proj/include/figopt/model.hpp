#pragma once

#include <Eigen/Dense>

#include <optional>
#include <variant>
#include <vector>

namespace figopt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// A vector of controllable variables d = (d_1, ..., d_k).
using ControlPoint = Eigen::VectorXd;

struct Bound {
  double lo;
  double hi;
  double width() const { return hi - lo; }
  friend bool operator==(const Bound&, const Bound&) = default;
};

// Box-shaped design region [a_1, b_1] x ... x [a_k, b_k].
class DesignSpace {
 public:
  explicit DesignSpace(std::vector<Bound> bounds);

  int k() const { return static_cast<int>(bounds_.size()); }
  const std::vector<Bound>& bounds() const { return bounds_; }
  const Bound& bound(int r) const { return bounds_[static_cast<std::size_t>(r)]; }
  double width(int r) const { return bound(r).width(); }

  bool contains(const ControlPoint& d) const;
  ControlPoint project(const ControlPoint& d) const;
  // Euclidean distance after dividing each coordinate difference by the
  // bound width.
  double scaled_distance(const ControlPoint& a, const ControlPoint& b) const;

  friend bool operator==(const DesignSpace&, const DesignSpace&) = default;

 private:
  std::vector<Bound> bounds_;
};

// An ordered list of n runs, all sharing dimension k.
class Design {
 public:
  explicit Design(std::vector<ControlPoint> points);
  static Design replicate(const ControlPoint& d, int n);

  int n() const { return static_cast<int>(points_.size()); }
  int k() const { return static_cast<int>(points_.front().size()); }
  const ControlPoint& operator[](int i) const { return points_[static_cast<std::size_t>(i)]; }
  const std::vector<ControlPoint>& points() const { return points_; }

 private:
  std::vector<ControlPoint> points_;
};

// Monomial regression function f_j(d) = prod_r d_r^{u_rj}; the exponent
// matrix is k x p with one column per regression term.
class RegressionSpec {
 public:
  explicit RegressionSpec(Eigen::MatrixXi exponents);

  static RegressionSpec intercept_only(int k);
  static RegressionSpec first_order(int k);
  // Intercept, main effects, squares, then two-way interactions.
  static RegressionSpec full_second_order(int k);

  int k() const { return static_cast<int>(exponents_.rows()); }
  int p() const { return static_cast<int>(exponents_.cols()); }
  const Eigen::MatrixXi& exponents() const { return exponents_; }
  int exponent(int r, int j) const { return exponents_(r, j); }

  friend bool operator==(const RegressionSpec& a, const RegressionSpec& b) {
    return a.exponents_.rows() == b.exponents_.rows() &&
           a.exponents_.cols() == b.exponents_.cols() && a.exponents_ == b.exponents_;
  }

 private:
  Eigen::MatrixXi exponents_;
};

struct KnownScale {
  double gamma = 1.0;
  friend bool operator==(const KnownScale&, const KnownScale&) = default;
};
struct ScaleOfInterest {
  friend bool operator==(const ScaleOfInterest&, const ScaleOfInterest&) = default;
};
// gamma ~ IG(s1/2, s2/2), marginalised out of the likelihood.
struct NuisanceIG {
  double s1 = 1.0;
  double s2 = 1.0;
  friend bool operator==(const NuisanceIG&, const NuisanceIG&) = default;
};

using ScaleSpec = std::variant<KnownScale, ScaleOfInterest, NuisanceIG>;

void validate_scale(const ScaleSpec& scale);

enum class Family { NormalLinear, PoissonGLM, LogisticGLM, CompartmentalNormal };

const char* family_name(Family family);

// Exponential-family response model. Poisson and logistic models carry a
// fixed known scale of 1. The compartmental model has k = 1, p = 3 and mean
// theta3 * (exp(-theta1 d) - exp(-theta2 d)) for theta2 > theta1.
class ModelSpec {
 public:
  static ModelSpec normal_linear(RegressionSpec regression, ScaleSpec scale);
  static ModelSpec poisson(RegressionSpec regression);
  static ModelSpec logistic(RegressionSpec regression);
  static ModelSpec compartmental(ScaleSpec scale);

  Family family() const { return family_; }
  int p() const;
  int k() const;
  bool is_glm() const { return family_ != Family::CompartmentalNormal; }
  bool is_normal() const {
    return family_ == Family::NormalLinear || family_ == Family::CompartmentalNormal;
  }
  // Null for the compartmental model.
  const RegressionSpec* regression() const { return regression_ ? &*regression_ : nullptr; }
  const ScaleSpec& scale() const { return scale_; }

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;

 private:
  ModelSpec(Family family, std::optional<RegressionSpec> regression, ScaleSpec scale);

  Family family_;
  std::optional<RegressionSpec> regression_;
  ScaleSpec scale_;
};

Vector eval_regression(const RegressionSpec& spec, const ControlPoint& d);

double mean(const ModelSpec& model, const Vector& theta, const ControlPoint& d);
Vector mean_gradient(const ModelSpec& model, const Vector& theta, const ControlPoint& d);
double variance(const ModelSpec& model, const Vector& theta, const ControlPoint& d, double gamma);

// n x p Jacobian of the mean with respect to theta, one row per run.
Matrix build_M(const ModelSpec& model, const Vector& theta, const Design& design);

// M^T W M with W_ii = 1 / var(y_i); requires a known scale gamma.
Matrix fisher_information(const ModelSpec& model, const Vector& theta, const Design& design,
                          double gamma);

}  // namespace figopt
