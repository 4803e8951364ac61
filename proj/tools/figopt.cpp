#include "figopt/builtin.hpp"
#include "figopt/config.hpp"
#include "figopt/diagnosis.hpp"
#include "figopt/phi.hpp"
#include "figopt/report.hpp"
#include "figopt/reproduce.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace figopt;

enum ExitCode { kOk = 0, kConfigError = 2, kAssertionFailed = 3, kNumericalError = 4 };

struct CommonFlags {
  std::uint64_t seed = 0;
  int starts = 0;
  int quad_order = 0;
  double dedup_tol = 0.0;
  std::string out;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* starts_opt = nullptr;
  CLI::Option* quad_opt = nullptr;
  CLI::Option* dedup_opt = nullptr;

  void attach(CLI::App* app, bool search_flags) {
    quad_opt = app->add_option("--quad-order", quad_order, "Quadrature order per prior component");
    if (search_flags) {
      seed_opt = app->add_option("--seed", seed, "Random seed (overrides the config)");
      starts_opt = app->add_option("--starts", starts, "Number of multistart local searches");
      dedup_opt = app->add_option("--dedup-tol", dedup_tol, "Scaled distance for merging endpoints");
    }
    app->add_option("--out", out, "Output file (default: stdout)");
  }

  ConfigOverrides overrides() const {
    ConfigOverrides o;
    if (seed_opt && seed_opt->count()) o.seed = seed;
    if (starts_opt && starts_opt->count()) o.starts = starts;
    if (quad_opt && quad_opt->count()) o.quadrature_order = quad_order;
    if (dedup_opt && dedup_opt->count()) o.dedup_tol = dedup_tol;
    return o;
  }
};

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path + ": cannot open output file");
  out << text;
}

CurveGrid parse_grid(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream in(spec);
  std::string item;
  while (std::getline(in, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--grid: expected lo:hi:step, got \"" + spec + "\"");
    }
  }
  if (parts.size() != 3) throw ConfigError("--grid: expected lo:hi:step, got \"" + spec + "\"");
  return {parts[0], parts[1], parts[2]};
}

ProblemConfig load_with(const std::string& path, const CommonFlags& flags) {
  ProblemConfig cfg = load_config(path);
  apply_overrides(cfg, flags.overrides());
  return cfg;
}

PipelineOptions pipeline(const ProblemConfig& cfg) {
  return {cfg.quadrature_order, cfg.redundancy_draws, cfg.seed};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expected Fisher information gain: phi evaluation, multistart maximisation and "
               "under-support / parameter-redundancy diagnosis"};
  app.require_subcommand(1);

  std::string config_path;
  std::string grid_spec;
  int axis = 1;
  std::vector<double> at;
  bool include_runs = false;
  int n_override = 0;

  CommonFlags curve_flags;
  auto* curve = app.add_subcommand("phi-curve", "Evaluate phi along a 1-D grid and write d,phi CSV");
  curve->add_option("config", config_path, "Problem config (JSON)")->required();
  curve->add_option("--grid", grid_spec, "Grid as lo:hi:step")->required();
  curve->add_option("--axis", axis, "1-based coordinate to vary (k > 1 models)");
  curve->add_option("--at", at, "Base point for the other coordinates (k > 1 models)")->delimiter(',');
  curve_flags.attach(curve, false);

  CommonFlags opt_flags;
  auto* optimize = app.add_subcommand("optimize", "Multistart maximisation of phi; JSON maxima report");
  optimize->add_option("config", config_path, "Problem config (JSON)")->required();
  optimize->add_flag("--runs", include_runs, "Include every local search in the report");
  opt_flags.attach(optimize, true);

  CommonFlags diag_flags;
  auto* diagnose = app.add_subcommand("diagnose", "Full pipeline: maxima, FIG-optimal design, redundancy");
  diagnose->add_option("config", config_path, "Problem config (JSON)")->required();
  diagnose->add_option("--n", n_override, "Number of runs (overrides the config)");
  diagnose->add_flag("--runs", include_runs, "Include every local search in the report");
  diag_flags.attach(diagnose, true);

  CommonFlags rule_flags;
  auto* rule = app.add_subcommand("rule", "Dump the prior quadrature rule as CSV");
  rule->add_option("config", config_path, "Problem config (JSON)")->required();
  rule_flags.attach(rule, false);

  CommonFlags repro_flags;
  std::string example;
  std::string out_dir = ".";
  auto* repro = app.add_subcommand("reproduce", "Run a built-in example and check its expected findings");
  repro->add_option("example", example, "rsm2 | poisson | logistic-woods | compartmental")->required();
  repro->add_option("--out-dir", out_dir, "Directory for the report (and CSV curve)");
  repro->add_flag("--runs", include_runs, "Include every local search in the report");
  repro_flags.attach(repro, true);

  CommonFlags show_flags;
  auto* show = app.add_subcommand("show-config", "Print a built-in example as a config file");
  show->add_option("example", example, "rsm2 | poisson | logistic-woods | compartmental")->required();
  show_flags.attach(show, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*curve) {
      const ProblemConfig cfg = load_with(config_path, curve_flags);
      const PhiEvaluator ev(cfg.model, cfg.prior, cfg.quadrature_order);
      std::optional<ControlPoint> base;
      if (cfg.model.k() > 1) {
        if (static_cast<int>(at.size()) != cfg.model.k()) {
          throw ConfigError("--at: a k=" + std::to_string(cfg.model.k()) +
                            " model needs a base point with k coordinates");
        }
        base = Eigen::Map<const Vector>(at.data(), static_cast<Eigen::Index>(at.size()));
      }
      write_output(curve_flags.out, curve_csv(phi_curve(ev, parse_grid(grid_spec), axis - 1, base)));
    } else if (*optimize) {
      const ProblemConfig cfg = load_with(config_path, opt_flags);
      const PhiEvaluator ev(cfg.model, cfg.prior, cfg.quadrature_order);
      const MaximaReport report = multistart(ev, cfg.space, cfg.optimizer);
      write_output(opt_flags.out, dump_report(envelope("optimize", cfg, maxima_to_json(report, include_runs))));
    } else if (*diagnose) {
      ProblemConfig cfg = load_with(config_path, diag_flags);
      if (diagnose->count("--n")) {
        if (n_override < 1) throw ConfigError("--n: must be a positive integer");
        cfg.n = n_override;
      }
      const FigReport report = fig_report(cfg.model, cfg.prior, cfg.space, cfg.n, cfg.optimizer, pipeline(cfg));
      // Keep stdout clean when the report itself goes there.
      std::ostream& lines = diag_flags.out.empty() || diag_flags.out == "-" ? std::cerr : std::cout;
      for (const auto& v : report.verdicts) lines << v << "\n";
      write_output(diag_flags.out, dump_report(envelope("diagnose", cfg, fig_report_to_json(report, include_runs))));
    } else if (*rule) {
      const ProblemConfig cfg = load_with(config_path, rule_flags);
      write_output(rule_flags.out, rule_to_csv(quadrature_rule(cfg.prior, cfg.quadrature_order)));
    } else if (*show) {
      write_output(show_flags.out, serialize_config(builtin_config(example)));
    } else if (*repro) {
      builtin_config(example);  // validates the name before any work
      const auto t0 = std::chrono::steady_clock::now();
      const ReproduceOutcome outcome = reproduce(example, {repro_flags.overrides(), include_runs});
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

      std::filesystem::create_directories(out_dir);
      const auto dir = std::filesystem::path(out_dir);
      write_output((dir / (example + ".json")).string(), dump_report(outcome.report));
      if (outcome.curve_csv) write_output((dir / (example + "-phi.csv")).string(), *outcome.curve_csv);
      for (const auto& c : outcome.checks) {
        std::cout << (c.passed ? "PASS  " : "FAIL  ") << c.name << "  [" << c.detail << "]\n";
      }
      std::cout << example << ": " << (outcome.passed() ? "all checks passed" : "CHECKS FAILED") << " in "
                << secs << " s\n";
      return outcome.passed() ? kOk : kAssertionFailed;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalError;
  }
  return kOk;
}
