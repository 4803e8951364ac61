#include "figopt/builtin.hpp"

namespace figopt {

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"rsm2", "poisson", "logistic-woods", "compartmental"};
  return names;
}

namespace {

// Second-order response surface in two variables on [-1, 1]^2:
// f(d) = (1, d1, d2, d1^2, d2^2, d1 d2).
ProblemConfig rsm2() {
  Eigen::MatrixXi u(2, 6);
  u << 0, 1, 0, 2, 0, 1,
       0, 0, 1, 0, 2, 1;
  ProblemConfig cfg{"rsm2", ModelSpec::normal_linear(RegressionSpec(u), NuisanceIG{4.0, 2.0}),
                    PriorSpec(std::vector<PriorComponent>(6, NormalPrior{0.0, 1.0})),
                    DesignSpace({{-1.0, 1.0}, {-1.0, 1.0}})};
  cfg.optimizer.starts = 1000;
  cfg.n = 8;
  return cfg;
}

// Poisson regression with f(d) = (1, d) and theta_j ~ N(0, 1).
ProblemConfig poisson() {
  Eigen::MatrixXi u(1, 2);
  u << 0, 1;
  ProblemConfig cfg{"poisson", ModelSpec::poisson(RegressionSpec(u)),
                    PriorSpec(std::vector<PriorComponent>(2, NormalPrior{0.0, 1.0})),
                    DesignSpace({{-1.0, 1.0}})};
  cfg.quadrature_order = 12;
  cfg.optimizer.starts = 200;
  cfg.n = 4;
  return cfg;
}

// First-order logistic regression in four variables with independent
// uniform priors.
ProblemConfig logistic_woods() {
  ProblemConfig cfg{"logistic-woods", ModelSpec::logistic(RegressionSpec::first_order(4)),
                    PriorSpec({UniformPrior{-3.0, 3.0}, UniformPrior{4.0, 10.0}, UniformPrior{5.0, 11.0},
                               UniformPrior{-6.0, 0.0}, UniformPrior{-2.5, 3.5}}),
                    DesignSpace({{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}})};
  cfg.optimizer.starts = 1000;
  cfg.n = 10;
  return cfg;
}

// First-order compartmental model; sampling times in [0, 24] hours.
ProblemConfig compartmental() {
  ProblemConfig cfg{"compartmental", ModelSpec::compartmental(NuisanceIG{4.0, 2.0}),
                    PriorSpec({UniformPrior{0.01884, 0.09884}, UniformPrior{0.298, 8.298},
                               PointMassPrior{21.8}}),
                    DesignSpace({{0.0, 24.0}})};
  cfg.optimizer.starts = 1000;
  cfg.n = 6;
  return cfg;
}

}  // namespace

ProblemConfig builtin_config(std::string_view name) {
  if (name == "rsm2") return rsm2();
  if (name == "poisson") return poisson();
  if (name == "logistic-woods") return logistic_woods();
  if (name == "compartmental") return compartmental();
  std::string valid;
  for (const auto& n : builtin_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw ConfigError("unknown example \"" + std::string(name) + "\"; valid names: " + valid);
}

}  // namespace figopt
