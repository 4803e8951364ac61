#include "figopt/phi.hpp"

#include "figopt/errors.hpp"

#include <cmath>
#include <cstdio>

namespace figopt {

const char* regime_name(Regime regime) {
  switch (regime) {
    case Regime::KnownScale: return "known_scale";
    case Regime::ScaleOfInterest: return "scale_of_interest";
    case Regime::NuisanceNormalIG: return "nuisance_normal_ig";
  }
  return "unknown";
}

Regime regime_of(const ScaleSpec& scale) {
  if (std::holds_alternative<KnownScale>(scale)) return Regime::KnownScale;
  if (std::holds_alternative<ScaleOfInterest>(scale)) return Regime::ScaleOfInterest;
  return Regime::NuisanceNormalIG;
}

PhiEvaluator::PhiEvaluator(ModelSpec model, PriorSpec prior, PhiMethod method)
    : model_(std::move(model)), prior_(std::move(prior)), regime_(regime_of(model_.scale())),
      method_(method) {
  if (prior_.p() != model_.p()) {
    throw InputError("prior has " + std::to_string(prior_.p()) + " components but the model has p=" +
                     std::to_string(model_.p()));
  }
  if (!model_.is_normal() && regime_ != Regime::KnownScale) {
    throw InputError("Poisson and logistic models have a known unit scale");
  }
  switch (regime_) {
    case Regime::KnownScale:
      precision_ = 1.0 / std::get<KnownScale>(model_.scale()).gamma;
      break;
    case Regime::ScaleOfInterest:
      if (!prior_.scale_prior()) {
        throw InputError("scale-of-interest regime needs an inverse-gamma scale prior");
      }
      precision_ = prior_.scale_prior()->s1 / prior_.scale_prior()->s2;
      break;
    case Regime::NuisanceNormalIG:
      precision_ = 1.0;
      break;
  }
}

PhiEvaluator::PhiEvaluator(ModelSpec model, PriorSpec prior, int quadrature_order,
                           std::size_t node_cap)
    : PhiEvaluator(std::move(model), std::move(prior), PhiMethod::Quadrature) {
  order_ = quadrature_order;
  // The normal linear integrand does not depend on theta, so a single node
  // per component integrates it exactly.
  const int effective = model_.family() == Family::NormalLinear ? 1 : order_;
  rule_ = std::make_shared<const QuadratureRule>(quadrature_rule(prior_, effective, node_cap));
}

PhiEvaluator PhiEvaluator::closed_form(ModelSpec model, PriorSpec prior) {
  PhiEvaluator ev(std::move(model), std::move(prior), PhiMethod::ClosedForm);
  switch (ev.model_.family()) {
    case Family::NormalLinear:
      break;
    case Family::PoissonGLM: {
      ev.sigma2_.resize(ev.prior_.p());
      for (int j = 0; j < ev.prior_.p(); ++j) {
        const auto* n = std::get_if<NormalPrior>(&ev.prior_.component(j));
        if (n == nullptr || n->mean != 0.0) {
          throw InputError("closed-form Poisson phi needs independent N(0, sigma^2) priors");
        }
        ev.sigma2_(j) = n->var;
      }
      break;
    }
    default:
      throw InputError(std::string("no closed form for the ") + family_name(ev.model_.family()) +
                       " model");
  }
  return ev;
}

const QuadratureRule& PhiEvaluator::rule() const {
  if (!rule_) throw InputError("closed-form evaluator has no quadrature rule");
  return *rule_;
}

double PhiEvaluator::operator()(const ControlPoint& d) const {
  return regime_ == Regime::NuisanceNormalIG ? phi_nuisance_normal(*this, d)
                                             : phi_known_scale(*this, d);
}

namespace {

// Per-thread buffer for the linear predictor at every node; large rules
// would otherwise allocate a fresh vector on each call.
Vector& scratch(Eigen::Index size) {
  thread_local Vector buffer;
  if (buffer.size() != size) buffer.resize(size);
  return buffer;
}

// exp(f' theta) at every node of a tensor rule as a product of per-axis
// factors exp(f_j t_j), which needs far fewer exponentials than the direct
// form. Declines when |eta| could exceed kMaxEta.
bool tensor_exp(const QuadratureRule& rule, const Vector& f, Vector& out) {
  constexpr double kMaxEta = 150.0;
  if (static_cast<Eigen::Index>(rule.axes.size()) != f.size()) return false;
  double bound = 0.0;
  Eigen::Index size = 1;
  for (int j = 0; j < f.size(); ++j) {
    bound += std::abs(f(j)) * rule.axes[j].cwiseAbs().maxCoeff();
    size *= rule.axes[j].size();
  }
  if (!(bound <= kMaxEta) || size != out.size()) return false;

  out(0) = 1.0;
  Eigen::Index filled = 1;
  for (int j = 0; j < f.size(); ++j) {
    const Vector factor = (f(j) * rule.axes[j].array()).exp();
    const Eigen::Index c = factor.size();
    // Back to front so each source entry is read before it is overwritten.
    for (Eigen::Index a = filled - 1; a >= 0; --a) out.segment(a * c, c) = out(a) * factor;
    filled *= c;
  }
  return true;
}

}  // namespace

// For the three GLM families the integrand factorises as h(eta) * |f(d)|^2
// with eta = f(d)' theta, so one matrix-vector product covers all nodes.
double PhiEvaluator::quadrature_glm(const ControlPoint& d) const {
  const Vector f = eval_regression(*model_.regression(), d);
  const double f2 = f.squaredNorm();
  const auto& rule = *rule_;
  double h = 1.0;
  switch (model_.family()) {
    case Family::NormalLinear:
      h = 1.0;
      break;
    case Family::PoissonGLM: {
      Vector& e = scratch(rule.nodes.rows());
      if (!tensor_exp(rule, f, e)) {
        e.noalias() = rule.nodes * f;
        e = e.array().exp();
      }
      h = rule.weights.dot(e);
      break;
    }
    case Family::LogisticGLM: {
      // mu (1 - mu) = e / (1 + e)^2 with e = exp(eta), or exp(-|eta|) when
      // eta is too large for the product form.
      Vector& e = scratch(rule.nodes.rows());
      if (!tensor_exp(rule, f, e)) {
        e.noalias() = rule.nodes * f;
        e = (-e.array().abs()).exp();
      }
      h = rule.weights.dot((e.array() / (1.0 + e.array()).square()).matrix());
      break;
    }
    default:
      break;
  }
  const double value = precision_ * h * f2;
  if (!std::isfinite(value)) {
    throw EvaluationError("non-finite phi at d with |f(d)|^2 = " + std::to_string(f2));
  }
  return value;
}

double PhiEvaluator::quadrature_generic(const ControlPoint& d) const {
  const double e = expect(*rule_, [&](const Vector& theta) {
    return mean_gradient(model_, theta, d).squaredNorm();
  });
  return precision_ * e;
}

double PhiEvaluator::closed(const ControlPoint& d) const {
  if (model_.family() == Family::PoissonGLM) {
    return phi_closed_poisson(*model_.regression(), sigma2_, d);
  }
  return precision_ * phi_closed_linear(*model_.regression(), d);
}

double phi_known_scale(const PhiEvaluator& ev, const ControlPoint& d) {
  if (ev.regime_ == Regime::NuisanceNormalIG) {
    throw InputError("phi_known_scale called on a nuisance-scale evaluator");
  }
  if (ev.method_ == PhiMethod::ClosedForm) return ev.closed(d);
  return ev.model_.is_glm() ? ev.quadrature_glm(d) : ev.quadrature_generic(d);
}

double phi_nuisance_normal(const PhiEvaluator& ev, const ControlPoint& d) {
  if (ev.regime_ != Regime::NuisanceNormalIG || !ev.model_.is_normal()) {
    throw InputError("phi_nuisance_normal needs a normal model with inverse-gamma nuisance scale");
  }
  if (ev.method_ == PhiMethod::ClosedForm) return ev.closed(d);
  return ev.model_.is_glm() ? ev.quadrature_glm(d) : ev.quadrature_generic(d);
}

double phi_closed_linear(const RegressionSpec& spec, const ControlPoint& d) {
  return eval_regression(spec, d).squaredNorm();
}

double phi_closed_poisson(const RegressionSpec& spec, const Vector& sigma2, const ControlPoint& d) {
  if (sigma2.size() != spec.p()) throw InputError("need one prior variance per parameter");
  const Vector f = eval_regression(spec, d);
  const Vector f2 = f.array().square();
  return std::exp(0.5 * sigma2.dot(f2)) * f2.sum();
}

double nuisance_information_factor(const NuisanceIG& scale, int n) {
  const double a = scale.s1;
  const double b = scale.s2;
  return a * (a + n) / (b * (a + n + 2.0));
}

double expected_fig(const PhiEvaluator& ev, const Design& design) {
  double total = 0.0;
  for (const auto& d : design.points()) total += ev(d);
  if (ev.regime() == Regime::NuisanceNormalIG) {
    total *= nuisance_information_factor(std::get<NuisanceIG>(ev.model().scale()), design.n());
  }
  return total;
}

std::size_t grid_size(const CurveGrid& grid) {
  if (!(grid.step > 0.0) || !(grid.lo <= grid.hi) || !std::isfinite(grid.lo) ||
      !std::isfinite(grid.hi)) {
    throw InputError("grid needs lo <= hi and step > 0");
  }
  return static_cast<std::size_t>(std::floor((grid.hi - grid.lo) / grid.step + 1e-9)) + 1;
}

std::vector<CurvePoint> phi_curve(const PhiEvaluator& ev, const CurveGrid& grid, int axis,
                                  std::optional<ControlPoint> base, std::size_t cap) {
  const int k = ev.model().k();
  if (!base) {
    if (k != 1) throw InputError("phi curve on a k > 1 model needs a slice base point");
    base = ControlPoint::Zero(1);
  }
  if (base->size() != k) throw InputError("slice base point has the wrong dimension");
  if (axis < 0 || axis >= k) throw InputError("slice axis out of range");
  const std::size_t count = grid_size(grid);
  if (count > cap) throw CapacityError("phi curve grid exceeds " + std::to_string(cap) + " points");

  std::vector<CurvePoint> curve;
  curve.reserve(count);
  ControlPoint d = *base;
  for (std::size_t i = 0; i < count; ++i) {
    d(axis) = std::min(grid.lo + static_cast<double>(i) * grid.step, grid.hi);
    curve.push_back({d(axis), ev(d)});
  }
  return curve;
}

std::string curve_csv(const std::vector<CurvePoint>& curve) {
  std::string out = "d,phi\n";
  char buf[96];
  for (const auto& pt : curve) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", pt.d, pt.phi);
    out += buf;
  }
  return out;
}

}  // namespace figopt
