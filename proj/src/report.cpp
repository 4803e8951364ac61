#include "figopt/report.hpp"

namespace figopt {

using nlohmann::json;

json point_to_json(const ControlPoint& d) {
  json out = json::array();
  for (int r = 0; r < d.size(); ++r) out.push_back(d(r));
  return out;
}

namespace {

json maxima_list(const std::vector<Maximum>& list) {
  json out = json::array();
  for (const auto& m : list) out.push_back({{"point", point_to_json(m.point)}, {"value", m.value}, {"hits", m.hits}});
  return out;
}

}  // namespace

json maxima_to_json(const MaximaReport& r, bool include_runs) {
  json out = {
      {"method", r.method},
      {"q", r.q},
      {"best_value", r.best_value},
      {"maxima", maxima_list(r.maxima)},
      {"secondary_maxima", maxima_list(r.secondary)},
      {"dedup_tol", r.dedup_tol},
      {"value_tol", r.value_tol},
  };
  if (r.method == "grid") {
    out["grid_points"] = r.grid_points;
  } else {
    out["starts"] = {
        {"total", r.starts},
        {"converged", r.starts_converged},
        {"accepted_at_limit", r.starts_accepted_at_limit},
        {"discarded", r.starts_discarded},
        {"failed", r.starts_failed},
        {"mean_iterations", r.mean_iterations},
        {"max_iterations", r.max_iterations},
    };
  }
  if (include_runs) {
    json runs = json::array();
    for (const auto& run : r.runs) {
      json entry = {{"start", point_to_json(run.start)},
                    {"point", point_to_json(run.point)},
                    {"value", run.value},
                    {"iterations", run.iterations},
                    {"pg_norm", run.pg_norm},
                    {"status", status_name(run.status)}};
      if (!run.error.empty()) entry["error"] = run.error;
      runs.push_back(entry);
    }
    out["runs"] = runs;
  }
  return out;
}

json redundancy_to_json(const RedundancyReport& r) {
  json ranks = json::array();
  for (const auto& rd : r.numerical_ranks) {
    ranks.push_back({{"theta", point_to_json(rd.theta)},
                     {"rank", rd.rank},
                     {"det_ratio", rd.det_ratio},
                     {"min_eigenvalue", rd.min_eigenvalue}});
  }
  json flags = json::array();
  for (const auto& f : r.symbolic_flags) {
    json entry = {{"kind", flag_kind_name(f.kind)}, {"description", f.description}};
    if (f.r >= 0) entry["witness"] = {{"r", f.r + 1}, {"j1", f.j1 + 1}, {"j2", f.j2 + 1}};
    flags.push_back(entry);
  }
  json out = {
      {"q", r.q},
      {"p", r.p},
      {"under_supported", r.under_supported},
      {"redundant", r.redundant},
      {"symbolic_flags", flags},
      {"warnings", r.warnings},
  };
  if (!r.numerical_ranks.empty()) {
    out["numerical_ranks"] = ranks;
    out["deficient_draws"] = r.deficient_draws;
    out["draws"] = r.draws;
    out["seed"] = r.seed;
    out["resamples"] = r.resamples;
    out["singular_at_all_draws"] = r.singular_at_all_draws;
  }
  if (r.q_upper_bound) out["q_upper_bound"] = *r.q_upper_bound;
  if (r.symmetric_coordinates) out["symmetric_coordinates"] = *r.symmetric_coordinates;
  return out;
}

json design_to_json(const Design& design) {
  json out = json::array();
  for (const auto& d : design.points()) out.push_back(point_to_json(d));
  return out;
}

json fig_report_to_json(const FigReport& r, bool include_runs) {
  json out = {
      {"maxima", maxima_to_json(r.maxima, include_runs)},
      {"design", design_to_json(r.design)},
      {"support_points", r.support},
      {"expected_fig", r.expected_fig},
      {"redundancy", redundancy_to_json(r.redundancy)},
      {"verdicts", r.verdicts},
  };
  if (r.symbolic) out["symbolic"] = redundancy_to_json(*r.symbolic);
  return out;
}

json envelope(const std::string& command, const ProblemConfig& config, json body) {
  return {
      {"schema_version", kReportSchemaVersion},
      {"command", command},
      {"config", config_to_json(config)},
      {"config_hash", config_hash(config)},
      {"result", std::move(body)},
  };
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

}  // namespace figopt
