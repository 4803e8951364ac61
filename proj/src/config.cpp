#include "figopt/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace figopt {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key)) fail(path.empty() ? key : path + "." + key, "unknown key");
  }
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const json& require(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) fail(join(path, key), "missing required field");
  return obj.at(key);
}

double get_number(const json& obj, const std::string& path, const char* key) {
  const json& v = require(obj, path, key);
  if (!v.is_number()) fail(join(path, key), "expected a number");
  return v.get<double>();
}

long long get_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<long long>();
}

int get_positive_int(const json& obj, const std::string& path, const char* key) {
  const long long v = get_integer(require(obj, path, key), join(path, key));
  if (v < 1 || v > 1'000'000'000) fail(join(path, key), "must be a positive integer");
  return static_cast<int>(v);
}

std::string get_string(const json& obj, const std::string& path, const char* key) {
  const json& v = require(obj, path, key);
  if (!v.is_string()) fail(join(path, key), "expected a string");
  return v.get<std::string>();
}

// Wraps model-level validation errors with the field path.
template <class F>
auto with_path(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

ScaleSpec parse_scale(const json& obj, const std::string& path) {
  const std::string type = get_string(obj, path, "type");
  if (type == "known") {
    check_keys(obj, path, {"type", "gamma"});
    const double gamma = get_number(obj, path, "gamma");
    if (!(gamma > 0.0)) fail(join(path, "gamma"), "must be positive");
    return KnownScale{gamma};
  }
  if (type == "of_interest") {
    check_keys(obj, path, {"type"});
    return ScaleOfInterest{};
  }
  if (type == "nuisance_ig") {
    check_keys(obj, path, {"type", "s1", "s2"});
    const double s1 = get_number(obj, path, "s1");
    const double s2 = get_number(obj, path, "s2");
    if (!(s1 > 0.0)) fail(join(path, "s1"), "must be positive");
    if (!(s2 > 0.0)) fail(join(path, "s2"), "must be positive");
    return NuisanceIG{s1, s2};
  }
  fail(join(path, "type"), "expected one of known, of_interest, nuisance_ig (got \"" + type + "\")");
}

RegressionSpec parse_exponents(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of rows, one per controllable variable");
  const std::size_t k = v.size();
  std::size_t p = 0;
  for (std::size_t r = 0; r < k; ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (!v[r].is_array() || v[r].empty()) fail(rp, "expected a non-empty array of exponents");
    if (r == 0) p = v[r].size();
    if (v[r].size() != p) fail(rp, "row has " + std::to_string(v[r].size()) + " entries, expected " + std::to_string(p));
  }
  Eigen::MatrixXi u(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(p));
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t j = 0; j < p; ++j) {
      const std::string ep = path + "[" + std::to_string(r) + "][" + std::to_string(j) + "]";
      const long long e = get_integer(v[r][j], ep);
      if (e < 0 || e > 64) fail(ep, "exponent must be an integer in [0, 64]");
      u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = static_cast<int>(e);
    }
  }
  return with_path(path, [&] { return RegressionSpec(std::move(u)); });
}

ModelSpec parse_model(const json& obj, const std::string& path) {
  check_keys(obj, path, {"family", "exponents", "scale"});
  const std::string family = get_string(obj, path, "family");
  if (family == "compartmental") {
    if (obj.contains("exponents")) fail(join(path, "exponents"), "not used by the compartmental model");
    return ModelSpec::compartmental(parse_scale(require(obj, path, "scale"), join(path, "scale")));
  }
  RegressionSpec reg = parse_exponents(require(obj, path, "exponents"), join(path, "exponents"));
  if (family == "normal_linear") {
    return ModelSpec::normal_linear(std::move(reg), parse_scale(require(obj, path, "scale"), join(path, "scale")));
  }
  if (family == "poisson" || family == "logistic") {
    if (obj.contains("scale")) {
      const ScaleSpec s = parse_scale(obj.at("scale"), join(path, "scale"));
      const auto* known = std::get_if<KnownScale>(&s);
      if (known == nullptr || known->gamma != 1.0) {
        fail(join(path, "scale"), family + " models have a known unit scale");
      }
    }
    return family == "poisson" ? ModelSpec::poisson(std::move(reg)) : ModelSpec::logistic(std::move(reg));
  }
  fail(join(path, "family"),
       "expected one of normal_linear, poisson, logistic, compartmental (got \"" + family + "\")");
}

PriorComponent parse_component(const json& obj, const std::string& path) {
  const std::string type = get_string(obj, path, "type");
  PriorComponent c;
  if (type == "normal") {
    check_keys(obj, path, {"type", "mean", "var"});
    c = NormalPrior{get_number(obj, path, "mean"), get_number(obj, path, "var")};
  } else if (type == "uniform") {
    check_keys(obj, path, {"type", "lo", "hi"});
    c = UniformPrior{get_number(obj, path, "lo"), get_number(obj, path, "hi")};
  } else if (type == "point_mass") {
    check_keys(obj, path, {"type", "value"});
    c = PointMassPrior{get_number(obj, path, "value")};
  } else {
    fail(join(path, "type"), "expected one of normal, uniform, point_mass (got \"" + type + "\")");
  }
  with_path(path, [&] {
    validate_component(c);
    return 0;
  });
  return c;
}

PriorSpec parse_prior(const json& obj, const std::string& path) {
  check_keys(obj, path, {"components", "scale_prior"});
  const json& comps = require(obj, path, "components");
  const std::string cpath = join(path, "components");
  if (!comps.is_array() || comps.empty()) fail(cpath, "expected a non-empty array");
  std::vector<PriorComponent> components;
  for (std::size_t j = 0; j < comps.size(); ++j) {
    components.push_back(parse_component(comps[j], cpath + "[" + std::to_string(j) + "]"));
  }
  std::optional<InverseGammaPrior> scale_prior;
  if (obj.contains("scale_prior")) {
    const std::string sp = join(path, "scale_prior");
    const json& s = obj.at("scale_prior");
    check_keys(s, sp, {"s1", "s2"});
    scale_prior = InverseGammaPrior{get_number(s, sp, "s1"), get_number(s, sp, "s2")};
  }
  return with_path(path, [&] { return PriorSpec(std::move(components), scale_prior); });
}

DesignSpace parse_space(const json& obj, const std::string& path) {
  check_keys(obj, path, {"bounds"});
  const json& b = require(obj, path, "bounds");
  const std::string bp = join(path, "bounds");
  if (!b.is_array() || b.empty()) fail(bp, "expected a non-empty array of [lo, hi] pairs");
  std::vector<Bound> bounds;
  for (std::size_t r = 0; r < b.size(); ++r) {
    const std::string rp = bp + "[" + std::to_string(r) + "]";
    if (!b[r].is_array() || b[r].size() != 2 || !b[r][0].is_number() || !b[r][1].is_number()) {
      fail(rp, "expected [lo, hi]");
    }
    const Bound bound{b[r][0].get<double>(), b[r][1].get<double>()};
    if (!(bound.lo < bound.hi)) fail(rp, "requires lo < hi");
    bounds.push_back(bound);
  }
  return DesignSpace(std::move(bounds));
}

OptimizerConfig parse_optimizer(const json& obj, const std::string& path) {
  check_keys(obj, path,
             {"starts", "grad_step", "convergence_tol", "max_iters", "dedup_tol", "value_tol"});
  OptimizerConfig cfg;
  if (obj.contains("starts")) cfg.starts = get_positive_int(obj, path, "starts");
  if (obj.contains("max_iters")) cfg.max_iters = get_positive_int(obj, path, "max_iters");
  auto positive = [&](const char* key, double& target) {
    if (!obj.contains(key)) return;
    target = get_number(obj, path, key);
    if (!(target > 0.0)) fail(join(path, key), "must be positive");
  };
  positive("grad_step", cfg.grad_step);
  positive("convergence_tol", cfg.convergence_tol);
  positive("dedup_tol", cfg.dedup_tol);
  positive("value_tol", cfg.value_tol);
  return cfg;
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json scale_to_json(const ScaleSpec& scale) {
  if (const auto* k = std::get_if<KnownScale>(&scale)) return {{"type", "known"}, {"gamma", k->gamma}};
  if (std::holds_alternative<ScaleOfInterest>(scale)) return {{"type", "of_interest"}};
  const auto& ig = std::get<NuisanceIG>(scale);
  return {{"type", "nuisance_ig"}, {"s1", ig.s1}, {"s2", ig.s2}};
}

json component_to_json(const PriorComponent& c) {
  if (const auto* n = std::get_if<NormalPrior>(&c)) return {{"type", "normal"}, {"mean", n->mean}, {"var", n->var}};
  if (const auto* u = std::get_if<UniformPrior>(&c)) return {{"type", "uniform"}, {"lo", u->lo}, {"hi", u->hi}};
  return {{"type", "point_mass"}, {"value", std::get<PointMassPrior>(c).value}};
}

}  // namespace

ProblemConfig parse_config(const json& doc) {
  check_keys(doc, "", {"schema_version", "name", "model", "prior", "space", "quadrature_order",
                       "optimizer", "n", "seed", "redundancy_draws"});
  if (doc.contains("schema_version")) {
    const long long v = get_integer(doc.at("schema_version"), "schema_version");
    if (v != kConfigSchemaVersion) fail("schema_version", "unsupported version " + std::to_string(v));
  }
  ModelSpec model = parse_model(require(doc, "", "model"), "model");
  PriorSpec prior = parse_prior(require(doc, "", "prior"), "prior");
  DesignSpace space = parse_space(require(doc, "", "space"), "space");
  if (prior.p() != model.p()) {
    fail("prior.components", "has " + std::to_string(prior.p()) + " entries but the model has p=" +
                                 std::to_string(model.p()));
  }
  if (space.k() != model.k()) {
    fail("space.bounds", "has " + std::to_string(space.k()) + " entries but the model has k=" +
                             std::to_string(model.k()));
  }
  if (std::holds_alternative<ScaleOfInterest>(model.scale()) && !prior.scale_prior()) {
    fail("prior.scale_prior", "required when model.scale.type is of_interest");
  }

  ProblemConfig cfg{"", std::move(model), std::move(prior), std::move(space)};
  if (doc.contains("name")) cfg.name = get_string(doc, "", "name");
  if (doc.contains("quadrature_order")) cfg.quadrature_order = get_positive_int(doc, "", "quadrature_order");
  if (doc.contains("optimizer")) cfg.optimizer = parse_optimizer(doc.at("optimizer"), "optimizer");
  if (doc.contains("n")) cfg.n = get_positive_int(doc, "", "n");
  if (doc.contains("redundancy_draws")) cfg.redundancy_draws = get_positive_int(doc, "", "redundancy_draws");
  if (doc.contains("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      fail("seed", "expected a non-negative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  cfg.optimizer.seed = cfg.seed;
  return cfg;
}

ProblemConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    throw ConfigError("line " + std::to_string(line) + ", column " + std::to_string(col) +
                      ": invalid JSON (" + e.what() + ")");
  }
  return parse_config(doc);
}

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config_text(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json config_to_json(const ProblemConfig& cfg) {
  json model = {{"family", family_name(cfg.model.family())}, {"scale", scale_to_json(cfg.model.scale())}};
  if (const auto* reg = cfg.model.regression()) {
    json rows = json::array();
    for (int r = 0; r < reg->k(); ++r) {
      json row = json::array();
      for (int j = 0; j < reg->p(); ++j) row.push_back(reg->exponent(r, j));
      rows.push_back(row);
    }
    model["exponents"] = rows;
  }
  json prior = {{"components", json::array()}};
  for (const auto& c : cfg.prior.components()) prior["components"].push_back(component_to_json(c));
  if (cfg.prior.scale_prior()) {
    prior["scale_prior"] = {{"s1", cfg.prior.scale_prior()->s1}, {"s2", cfg.prior.scale_prior()->s2}};
  }
  json bounds = json::array();
  for (const auto& b : cfg.space.bounds()) bounds.push_back({b.lo, b.hi});
  const auto& o = cfg.optimizer;
  return {
      {"schema_version", kConfigSchemaVersion},
      {"name", cfg.name},
      {"model", model},
      {"prior", prior},
      {"space", {{"bounds", bounds}}},
      {"quadrature_order", cfg.quadrature_order},
      {"optimizer",
       {{"starts", o.starts},
        {"grad_step", o.grad_step},
        {"convergence_tol", o.convergence_tol},
        {"max_iters", o.max_iters},
        {"dedup_tol", o.dedup_tol},
        {"value_tol", o.value_tol}}},
      {"n", cfg.n},
      {"seed", cfg.seed},
      {"redundancy_draws", cfg.redundancy_draws},
  };
}

std::string serialize_config(const ProblemConfig& config) { return config_to_json(config).dump(2) + "\n"; }

void apply_overrides(ProblemConfig& config, const ConfigOverrides& o) {
  if (o.seed) config.seed = *o.seed;
  if (o.starts) {
    if (*o.starts < 1) throw ConfigError("--starts: must be a positive integer");
    config.optimizer.starts = *o.starts;
  }
  if (o.quadrature_order) {
    if (*o.quadrature_order < 1) throw ConfigError("--quad-order: must be a positive integer");
    config.quadrature_order = *o.quadrature_order;
  }
  if (o.dedup_tol) {
    if (!(*o.dedup_tol > 0.0)) throw ConfigError("--dedup-tol: must be positive");
    config.optimizer.dedup_tol = *o.dedup_tol;
  }
  config.optimizer.seed = config.seed;
}

std::string config_hash(const ProblemConfig& config) {
  const std::string body = config_to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : body) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace figopt
