#pragma once

#include "figopt/errors.hpp"
#include "figopt/model.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace figopt {

struct NormalPrior {
  double mean = 0.0;
  double var = 1.0;
  friend bool operator==(const NormalPrior&, const NormalPrior&) = default;
};
struct UniformPrior {
  double lo = 0.0;
  double hi = 1.0;
  friend bool operator==(const UniformPrior&, const UniformPrior&) = default;
};
struct PointMassPrior {
  double value = 0.0;
  friend bool operator==(const PointMassPrior&, const PointMassPrior&) = default;
};

using PriorComponent = std::variant<NormalPrior, UniformPrior, PointMassPrior>;

void validate_component(const PriorComponent& component);

// gamma ~ IG(s1/2, s2/2). E[1/gamma] = s1 / s2.
struct InverseGammaPrior {
  double s1 = 1.0;
  double s2 = 1.0;
  friend bool operator==(const InverseGammaPrior&, const InverseGammaPrior&) = default;
};

// Independent priors, one component per parameter, plus an optional prior
// on the scale.
class PriorSpec {
 public:
  explicit PriorSpec(std::vector<PriorComponent> components,
                     std::optional<InverseGammaPrior> scale_prior = std::nullopt);

  int p() const { return static_cast<int>(components_.size()); }
  const std::vector<PriorComponent>& components() const { return components_; }
  const PriorComponent& component(int j) const { return components_[static_cast<std::size_t>(j)]; }
  const std::optional<InverseGammaPrior>& scale_prior() const { return scale_prior_; }

  friend bool operator==(const PriorSpec&, const PriorSpec&) = default;

 private:
  std::vector<PriorComponent> components_;
  std::optional<InverseGammaPrior> scale_prior_;
};

// Deterministic in the seed; components are drawn independently.
std::vector<Vector> sample_prior(const PriorSpec& prior, int count, std::uint64_t seed);

// Tensor-product rule over the prior. Rows of `nodes` are parameter vectors;
// weights form a probability measure.
struct QuadratureRule {
  Matrix nodes;
  Vector weights;
  // Distinct node values per component when the rule is a tensor product
  // (last component fastest); empty otherwise.
  std::vector<Vector> axes;

  int size() const { return static_cast<int>(weights.size()); }
  int p() const { return static_cast<int>(nodes.cols()); }
};

inline constexpr std::size_t kDefaultNodeCap = 10'000'000;

QuadratureRule quadrature_rule(const PriorSpec& prior, int order,
                               std::size_t cap = kDefaultNodeCap);
// Per-component orders; point masses always contribute a single node.
QuadratureRule quadrature_rule(const PriorSpec& prior, std::span<const int> orders,
                               std::size_t cap = kDefaultNodeCap);

// Sum_c w_c g(t_c).
template <class G>
double expect(const QuadratureRule& rule, G&& g) {
  double total = 0.0;
  Vector node(rule.p());
  for (int c = 0; c < rule.size(); ++c) {
    node = rule.nodes.row(c).transpose();
    const double value = g(static_cast<const Vector&>(node));
    if (!std::isfinite(value)) {
      std::ostringstream msg;
      msg << "non-finite integrand value " << value << " at quadrature node " << c << " (";
      for (int j = 0; j < rule.p(); ++j) msg << (j ? ", " : "") << node(j);
      msg << ")";
      throw EvaluationError(msg.str());
    }
    total += rule.weights(c) * value;
  }
  return total;
}

// One column per parameter (t1..tp) followed by the weight.
std::string rule_to_csv(const QuadratureRule& rule);

}  // namespace figopt
