#pragma once

#include "figopt/config.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace figopt {

// rsm2, poisson, logistic-woods, compartmental.
const std::vector<std::string>& builtin_names();

// Throws ConfigError for unknown names.
ProblemConfig builtin_config(std::string_view name);

}  // namespace figopt
