#pragma once

#include "figopt/config.hpp"
#include "figopt/diagnosis.hpp"
#include "figopt/optimizer.hpp"

#include "json.hpp"

#include <string>

namespace figopt {

inline constexpr int kReportSchemaVersion = 1;

nlohmann::json point_to_json(const ControlPoint& d);

// With include_runs, every local search is listed (start, end point, value,
// iterations, status).
nlohmann::json maxima_to_json(const MaximaReport& report, bool include_runs = false);
nlohmann::json redundancy_to_json(const RedundancyReport& report);
nlohmann::json design_to_json(const Design& design);
nlohmann::json fig_report_to_json(const FigReport& report, bool include_runs = false);

// Wraps a report body with the schema version, command name, config echo and
// config hash. No timestamps, so identical inputs give identical bytes.
nlohmann::json envelope(const std::string& command, const ProblemConfig& config,
                        nlohmann::json body);

// Sorted keys, two-space indent, trailing newline.
std::string dump_report(const nlohmann::json& report);

}  // namespace figopt
