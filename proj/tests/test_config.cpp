#include "doctest.h"

#include "figopt/builtin.hpp"
#include "figopt/config.hpp"

#include <fstream>
#include <sstream>

using namespace figopt;

#ifndef FIGOPT_CONFIG_DIR
#define FIGOPT_CONFIG_DIR "configs"
#endif

namespace {

std::string message_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::string minimal() {
  return R"({
  "schema_version": 1,
  "model": {"family": "poisson", "exponents": [[0, 1]]},
  "prior": {"components": [{"type": "normal", "mean": 0, "var": 1},
                           {"type": "uniform", "lo": -1, "hi": 1}]},
  "space": {"bounds": [[-1, 1]]}
})";
}

}  // namespace

TEST_CASE("builtin configs round-trip") {
  for (const auto& name : builtin_names()) {
    const ProblemConfig cfg = builtin_config(name);
    const std::string text = serialize_config(cfg);
    CHECK(parse_config_text(text) == cfg);
    CHECK(serialize_config(parse_config_text(text)) == text);
    CHECK(config_hash(cfg) == config_hash(parse_config_text(text)));
    CHECK(config_hash(cfg).size() == 16);
  }
  CHECK_THROWS_AS(builtin_config("nope"), ConfigError);
}

TEST_CASE("shipped config files match the builtins") {
  for (const auto& name : builtin_names()) {
    const ProblemConfig cfg = load_config(std::string(FIGOPT_CONFIG_DIR) + "/" + name + ".json");
    CHECK(cfg == builtin_config(name));
  }
}

TEST_CASE("defaults fill in omitted fields") {
  const ProblemConfig cfg = parse_config_text(minimal());
  CHECK(cfg.quadrature_order == 8);
  CHECK(cfg.n == 1);
  CHECK(cfg.seed == 1);
  CHECK(cfg.optimizer.starts == 1000);
  CHECK(cfg.optimizer.dedup_tol == 1e-4);
  CHECK(cfg.model.family() == Family::PoissonGLM);
  CHECK(cfg.prior.p() == 2);
}

TEST_CASE("errors name the offending field") {
  std::string text = minimal();
  text.replace(text.find("\"space\""), 7, "\"spaec\"");
  CHECK(message_of(text).find("spaec") != std::string::npos);

  std::string bad_var = minimal();
  bad_var.replace(bad_var.find("\"var\": 1"), 8, "\"var\": -1");
  const std::string msg = message_of(bad_var);
  CHECK(msg.find("prior.components[0]") != std::string::npos);

  std::string wrong_p = minimal();
  wrong_p.replace(wrong_p.find("[[0, 1]]"), 8, "[[0, 1, 2]]");
  CHECK_FALSE(message_of(wrong_p).empty());

  std::string wrong_k = minimal();
  wrong_k.replace(wrong_k.find("[[-1, 1]]"), 9, "[[-1, 1], [0, 1]]");
  CHECK_FALSE(message_of(wrong_k).empty());

  std::string version = minimal();
  version.replace(version.find("\"schema_version\": 1"), 19, "\"schema_version\": 7");
  CHECK(message_of(version).find("schema_version") != std::string::npos);
}

TEST_CASE("syntax errors report line and column") {
  const std::string msg = message_of("{\n  \"model\": {,\n}");
  CHECK(msg.find("line 2") != std::string::npos);
  CHECK(msg.find("column") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("overrides") {
  ProblemConfig cfg = builtin_config("poisson");
  ConfigOverrides o;
  o.seed = 42;
  o.starts = 7;
  o.quadrature_order = 5;
  o.dedup_tol = 1e-3;
  apply_overrides(cfg, o);
  CHECK(cfg.seed == 42);
  CHECK(cfg.optimizer.seed == 42);
  CHECK(cfg.optimizer.starts == 7);
  CHECK(cfg.quadrature_order == 5);
  CHECK(cfg.optimizer.dedup_tol == 1e-3);
  CHECK(config_hash(cfg) != config_hash(builtin_config("poisson")));
  o.starts = 0;
  CHECK_THROWS_AS(apply_overrides(cfg, o), ConfigError);
}

TEST_CASE("scale variants parse") {
  std::string text = minimal();
  text.replace(text.find("\"poisson\""), 9, "\"normal_linear\"");
  text.replace(text.find("\"exponents\""), 11, "\"scale\": {\"type\": \"of_interest\"}, \"exponents\"");
  text.replace(text.find("\"components\""), 12, "\"scale_prior\": {\"s1\": 6, \"s2\": 3}, \"components\"");
  const ProblemConfig cfg = parse_config_text(text);
  CHECK(std::holds_alternative<ScaleOfInterest>(cfg.model.scale()));
  REQUIRE(cfg.prior.scale_prior().has_value());
  CHECK(cfg.prior.scale_prior()->s1 == 6.0);
  CHECK(parse_config_text(serialize_config(cfg)) == cfg);
}
