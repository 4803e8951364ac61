#pragma once

#include "figopt/config.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace figopt {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ReproduceOutcome {
  std::string name;
  nlohmann::json report;
  std::vector<Check> checks;
  // The phi(d) curve on [0, 24] for the compartmental example.
  std::optional<std::string> curve_csv;

  bool passed() const;
};

struct ReproduceOptions {
  ConfigOverrides overrides;
  bool include_runs = false;
};

// Runs one of the built-in examples end to end and evaluates its expected
// findings (maxima counts and locations, support and rank verdicts).
ReproduceOutcome reproduce(std::string_view name, const ReproduceOptions& options = {});

// Max relative gap between the closed-form and Hermite-quadrature Poisson phi
// over `points` equally spaced d in [-1, 1] for f(d) = (1, d), sigma^2 = (1, 1).
double poisson_closed_vs_quadrature(int order, int points = 41);

}  // namespace figopt
