#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "spinevo/cyclic.hpp"
#include "spinevo/precess.hpp"
#include "spinevo/scenario.hpp"

namespace spinevo {

using Json = nlohmann::ordered_json;

namespace exit_code {
inline constexpr int success = 0;
inline constexpr int error = 1;
inline constexpr int not_applicable = 2;
}  // namespace exit_code

struct RunOutcome {
  int exit_code = exit_code::success;
  Json report;
};

/// Executes the scenario's analysis and assembles the report document
/// {"scenario", "results", "diagnostics"} (plus "error" on failure).
/// Never throws for analysis failures; they map to exit codes.
RunOutcome run(const Scenario& scenario, const std::vector<std::string>& warnings = {});

/// Report for an error raised before a scenario was available.
Json error_report(const Error& error);

/// One cyclic report in the published per-report schema.
Json cyclic_report_json(const CyclicReport& report);

/// Serializes with 17 significant digits; non-finite numbers become null.
std::string dump_json(const Json& value, int indent = 2);

/// Writes `content` to a temporary sibling file and renames it over `path`.
void write_file_atomically(const std::string& path, const std::string& content);

/// Trajectory started at the scenario's e0 (z when absent) over [0, tau].
PrecessionTrajectory scenario_trajectory(const Scenario& scenario);

}  // namespace spinevo
