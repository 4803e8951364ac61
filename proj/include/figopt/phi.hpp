#pragma once

#include "figopt/model.hpp"
#include "figopt/priors.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace figopt {

enum class Regime { KnownScale, ScaleOfInterest, NuisanceNormalIG };
enum class PhiMethod { Quadrature, ClosedForm };

const char* regime_name(Regime regime);
Regime regime_of(const ScaleSpec& scale);

inline constexpr int kDefaultQuadratureOrder = 8;

// The per-run objective phi(d) for a model/prior pair. A FIG-optimal design
// places every run at a maximiser of phi, so the expected FIG utility of a
// design is (up to a regime-dependent constant) the sum of phi over its runs.
//
// Prior expectations use a tensor-product quadrature rule unless the
// evaluator is built with closed_form(), which is available for the normal
// linear model (any prior) and for the Poisson model under independent
// zero-mean normal priors.
//
// Immutable after construction; concurrent evaluation is safe.
class PhiEvaluator {
 public:
  PhiEvaluator(ModelSpec model, PriorSpec prior, int quadrature_order = kDefaultQuadratureOrder,
               std::size_t node_cap = kDefaultNodeCap);

  static PhiEvaluator closed_form(ModelSpec model, PriorSpec prior);

  double operator()(const ControlPoint& d) const;

  const ModelSpec& model() const { return model_; }
  const PriorSpec& prior() const { return prior_; }
  Regime regime() const { return regime_; }
  PhiMethod method() const { return method_; }
  int quadrature_order() const { return order_; }
  // Throws for closed-form evaluators.
  const QuadratureRule& rule() const;

  // E[1/gamma] under the scale prior in the scale-of-interest regime, 1/gamma
  // for a known scale, and 1 in the nuisance regime.
  double precision_factor() const { return precision_; }

 private:
  PhiEvaluator(ModelSpec model, PriorSpec prior, PhiMethod method);

  double quadrature_glm(const ControlPoint& d) const;
  double quadrature_generic(const ControlPoint& d) const;
  double closed(const ControlPoint& d) const;

  friend double phi_known_scale(const PhiEvaluator&, const ControlPoint&);
  friend double phi_nuisance_normal(const PhiEvaluator&, const ControlPoint&);

  ModelSpec model_;
  PriorSpec prior_;
  Regime regime_;
  PhiMethod method_;
  int order_ = 0;
  double precision_ = 1.0;
  std::shared_ptr<const QuadratureRule> rule_;
  Vector sigma2_;  // closed-form Poisson only
};

// Sum_j E[(d mu / d theta_j)^2 / var(y)] (known scale, or scale of interest
// with the expectation extended over gamma).
double phi_known_scale(const PhiEvaluator& ev, const ControlPoint& d);

// Sum_j E[(d mu / d theta_j)^2] for a normal response with inverse-gamma
// nuisance scale.
double phi_nuisance_normal(const PhiEvaluator& ev, const ControlPoint& d);

// Sum_j prod_r (d_r^{u_rj})^2.
double phi_closed_linear(const RegressionSpec& spec, const ControlPoint& d);

// exp(1/2 Sum_j sigma_j^2 f_j(d)^2) Sum_j f_j(d)^2 for theta_j ~ N(0, sigma_j^2).
double phi_closed_poisson(const RegressionSpec& spec, const Vector& sigma2, const ControlPoint& d);

// a(a+n) / (b(a+n+2)) with (a, b) = (s1, s2): the multivariate-t Fisher
// information factor for n runs.
double nuisance_information_factor(const NuisanceIG& scale, int n);

double expected_fig(const PhiEvaluator& ev, const Design& design);

struct CurveGrid {
  double lo = 0.0;
  double hi = 1.0;
  double step = 0.1;
};

// Number of grid points lo, lo+step, ..., clipped to hi (inclusive).
std::size_t grid_size(const CurveGrid& grid);

struct CurvePoint {
  double d;
  double phi;
};

// phi along coordinate `axis`, other coordinates fixed at `base`. For k = 1
// models `base` may be omitted.
std::vector<CurvePoint> phi_curve(const PhiEvaluator& ev, const CurveGrid& grid, int axis = 0,
                                  std::optional<ControlPoint> base = std::nullopt,
                                  std::size_t cap = 10'000'000);

// Header "d,phi", LF line endings, 12 significant digits.
std::string curve_csv(const std::vector<CurvePoint>& curve);

}  // namespace figopt
