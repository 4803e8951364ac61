#pragma once

#include "figopt/errors.hpp"
#include "figopt/model.hpp"
#include "figopt/optimizer.hpp"
#include "figopt/priors.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace figopt {

// Invalid configuration; the message starts with the offending field path
// (e.g. "model.scale.gamma") or, for syntax errors, "line L, column C".
class ConfigError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kConfigSchemaVersion = 1;

struct ProblemConfig {
  ProblemConfig(std::string name_, ModelSpec model_, PriorSpec prior_, DesignSpace space_)
      : name(std::move(name_)), model(std::move(model_)), prior(std::move(prior_)), space(std::move(space_)) {}

  std::string name;
  ModelSpec model;
  PriorSpec prior;
  DesignSpace space;
  int quadrature_order = 8;
  OptimizerConfig optimizer;  // optimizer.seed mirrors `seed`
  int n = 1;
  std::uint64_t seed = 1;
  int redundancy_draws = 100;

  friend bool operator==(const ProblemConfig&, const ProblemConfig&) = default;
};

ProblemConfig parse_config(const nlohmann::json& doc);
ProblemConfig parse_config_text(const std::string& text);
ProblemConfig load_config(const std::string& path);

nlohmann::json config_to_json(const ProblemConfig& config);
// Pretty-printed JSON with sorted keys.
std::string serialize_config(const ProblemConfig& config);

// Command-line values take precedence over the file.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> starts;
  std::optional<int> quadrature_order;
  std::optional<double> dedup_tol;
};

void apply_overrides(ProblemConfig& config, const ConfigOverrides& overrides);

// 64-bit FNV-1a of the compact serialized config, as 16 hex digits.
std::string config_hash(const ProblemConfig& config);

}  // namespace figopt
