// spinevo: run scenario files and write JSON reports / CSV trajectories.

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spinevo/error.hpp"
#include "spinevo/runner.hpp"
#include "spinevo/scenario.hpp"

namespace {

struct Overrides {
  std::optional<int> steps;
  std::optional<int> oracle_steps;
  std::optional<std::uint64_t> seed;
};

spinevo::Scenario load(const std::string& path, const Overrides& o,
                       std::vector<std::string>& warnings) {
  spinevo::Scenario sc = spinevo::load_scenario(path, &warnings);
  if (o.steps) sc.steps = *o.steps;
  if (o.oracle_steps) sc.oracle_steps = *o.oracle_steps;
  if (o.seed) sc.seed = *o.seed;
  spinevo::validate_scenario(sc);
  return sc;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    spinevo::write_file_atomically(path, text);
  }
}

int report_error(const spinevo::Error& e) {
  std::cerr << "spinevo: " << spinevo::to_string(e.code()) << ": " << e.what() << '\n';
  std::cout << spinevo::dump_json(spinevo::error_report(e));
  return e.code() == spinevo::ErrorCode::not_applicable ? spinevo::exit_code::not_applicable
                                                        : spinevo::exit_code::error;
}

int run_scenario(const std::string& path, const Overrides& o, bool verify) {
  std::vector<std::string> warnings;
  spinevo::Scenario sc = load(path, o, warnings);
  if (verify) sc.analysis = spinevo::AnalysisKind::verify_suite;
  for (const auto& w : warnings) std::cerr << "spinevo: warning: " << w << '\n';

  const spinevo::RunOutcome outcome = spinevo::run(sc, warnings);
  emit(sc.output.report, spinevo::dump_json(outcome.report));
  if (!sc.output.trajectory_csv.empty() && outcome.exit_code == spinevo::exit_code::success) {
    std::ostringstream csv;
    spinevo::write_trajectory_csv(csv, spinevo::scenario_trajectory(sc));
    spinevo::write_file_atomically(sc.output.trajectory_csv, csv.str());
  }
  if (outcome.report.contains("error")) {
    std::cerr << "spinevo: " << outcome.report["error"]["code"].get<std::string>() << ": "
              << outcome.report["error"]["message"].get<std::string>() << '\n';
  }
  return outcome.exit_code;
}

int dump_trajectory(const std::string& path, const std::string& csv_path, const Overrides& o) {
  std::vector<std::string> warnings;
  const spinevo::Scenario sc = load(path, o, warnings);
  for (const auto& w : warnings) std::cerr << "spinevo: warning: " << w << '\n';
  std::ostringstream csv;
  spinevo::write_trajectory_csv(csv, spinevo::scenario_trajectory(sc));
  spinevo::write_file_atomically(csv_path, csv.str());
  return spinevo::exit_code::success;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact spin propagators from a single precession trajectory"};
  app.require_subcommand(1);

  Overrides overrides;
  std::string scenario_path;
  std::string csv_path;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("scenario-file", scenario_path, "Scenario YAML file")->required();
    sub->add_option("--steps", overrides.steps, "Trajectory steps (overrides the file)");
    sub->add_option("--oracle-steps", overrides.oracle_steps, "Oracle steps (overrides the file)");
    sub->add_option("--seed", overrides.seed, "Seed for randomized checks (overrides the file)");
  };
  CLI::App* run_cmd = app.add_subcommand("run", "Run the scenario's analysis");
  add_common(run_cmd);
  CLI::App* verify_cmd = app.add_subcommand("verify", "Run the invariant battery on the scenario");
  add_common(verify_cmd);
  CLI::App* dump_cmd = app.add_subcommand("dump-trajectory", "Write the precession trajectory as CSV");
  add_common(dump_cmd);
  dump_cmd->add_option("csv-path", csv_path, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : spinevo::exit_code::error;
  }

  try {
    if (*run_cmd) return run_scenario(scenario_path, overrides, false);
    if (*verify_cmd) return run_scenario(scenario_path, overrides, true);
    return dump_trajectory(scenario_path, csv_path, overrides);
  } catch (const spinevo::Error& e) {
    return report_error(e);
  } catch (const std::exception& e) {
    std::cerr << "spinevo: " << e.what() << '\n';
    return spinevo::exit_code::error;
  }
}
