#include "figopt/priors.hpp"

#include "figopt/quadrature.hpp"

#include <cstdio>
#include <numbers>
#include <random>

namespace figopt {

namespace {

Rule1D component_rule(const PriorComponent& component, int order) {
  Rule1D rule;
  if (const auto* u = std::get_if<UniformPrior>(&component)) {
    rule = gauss_legendre(order);
    const double half = 0.5 * (u->hi - u->lo);
    const double mid = 0.5 * (u->hi + u->lo);
    for (auto& x : rule.nodes) x = mid + half * x;
    for (auto& w : rule.weights) w *= 0.5;
  } else if (const auto* n = std::get_if<NormalPrior>(&component)) {
    rule = gauss_hermite(order);
    const double scale = std::sqrt(2.0 * n->var);
    for (auto& x : rule.nodes) x = n->mean + scale * x;
    for (auto& w : rule.weights) w /= std::sqrt(std::numbers::pi);
  } else {
    rule.nodes = {std::get<PointMassPrior>(component).value};
    rule.weights = {1.0};
  }
  return rule;
}

}  // namespace

void validate_component(const PriorComponent& component) {
  if (const auto* n = std::get_if<NormalPrior>(&component)) {
    if (!std::isfinite(n->mean) || !(n->var > 0.0) || !std::isfinite(n->var)) {
      throw InputError("normal prior requires finite mean and positive variance");
    }
  } else if (const auto* u = std::get_if<UniformPrior>(&component)) {
    if (!std::isfinite(u->lo) || !std::isfinite(u->hi) || !(u->lo < u->hi)) {
      throw InputError("uniform prior requires lo < hi");
    }
  } else if (!std::isfinite(std::get<PointMassPrior>(component).value)) {
    throw InputError("point mass value must be finite");
  }
}

PriorSpec::PriorSpec(std::vector<PriorComponent> components,
                     std::optional<InverseGammaPrior> scale_prior)
    : components_(std::move(components)), scale_prior_(scale_prior) {
  if (components_.empty()) throw InputError("prior needs at least one component");
  for (const auto& c : components_) validate_component(c);
  if (scale_prior_ && (!(scale_prior_->s1 > 0.0) || !(scale_prior_->s2 > 0.0))) {
    throw InputError("scale prior hyperparameters must be positive");
  }
}

std::vector<Vector> sample_prior(const PriorSpec& prior, int count, std::uint64_t seed) {
  if (count < 1) throw InputError("sample count must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<Vector> draws;
  draws.reserve(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) {
    Vector theta(prior.p());
    for (int j = 0; j < prior.p(); ++j) {
      const auto& c = prior.component(j);
      if (const auto* n = std::get_if<NormalPrior>(&c)) {
        theta(j) = std::normal_distribution<double>(n->mean, std::sqrt(n->var))(rng);
      } else if (const auto* u = std::get_if<UniformPrior>(&c)) {
        theta(j) = std::uniform_real_distribution<double>(u->lo, u->hi)(rng);
      } else {
        theta(j) = std::get<PointMassPrior>(c).value;
      }
    }
    draws.push_back(std::move(theta));
  }
  return draws;
}

QuadratureRule quadrature_rule(const PriorSpec& prior, int order, std::size_t cap) {
  std::vector<int> orders(static_cast<std::size_t>(prior.p()), order);
  return quadrature_rule(prior, orders, cap);
}

QuadratureRule quadrature_rule(const PriorSpec& prior, std::span<const int> orders,
                               std::size_t cap) {
  if (static_cast<int>(orders.size()) != prior.p()) {
    throw InputError("need one quadrature order per prior component");
  }
  std::vector<Rule1D> rules;
  std::size_t total = 1;
  for (int j = 0; j < prior.p(); ++j) {
    if (orders[j] < 1) throw InputError("quadrature order must be >= 1");
    rules.push_back(component_rule(prior.component(j), orders[j]));
    total *= rules.back().nodes.size();
    if (total > cap) {
      throw CapacityError("quadrature tensor exceeds node cap of " + std::to_string(cap));
    }
  }

  const int p = prior.p();
  QuadratureRule rule{Matrix(static_cast<Eigen::Index>(total), p),
                      Vector(static_cast<Eigen::Index>(total)), {}};
  // Odometer over the per-component indices; the last component varies fastest.
  std::vector<std::size_t> idx(static_cast<std::size_t>(p), 0);
  for (std::size_t c = 0; c < total; ++c) {
    double w = 1.0;
    for (int j = 0; j < p; ++j) {
      rule.nodes(static_cast<Eigen::Index>(c), j) = rules[j].nodes[idx[j]];
      w *= rules[j].weights[idx[j]];
    }
    rule.weights(static_cast<Eigen::Index>(c)) = w;
    for (int j = p - 1; j >= 0; --j) {
      if (++idx[j] < rules[j].nodes.size()) break;
      idx[j] = 0;
    }
  }
  rule.weights /= rule.weights.sum();
  for (const auto& r : rules) {
    rule.axes.push_back(Eigen::Map<const Vector>(r.nodes.data(), static_cast<Eigen::Index>(r.nodes.size())));
  }
  return rule;
}

std::string rule_to_csv(const QuadratureRule& rule) {
  std::string out;
  for (int j = 0; j < rule.p(); ++j) out += "t" + std::to_string(j + 1) + ",";
  out += "weight\n";
  char buf[64];
  for (int c = 0; c < rule.size(); ++c) {
    for (int j = 0; j < rule.p(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,", rule.nodes(c, j));
      out += buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g\n", rule.weights(c));
    out += buf;
  }
  return out;
}

}  // namespace figopt
