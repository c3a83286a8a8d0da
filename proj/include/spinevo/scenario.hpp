#pragma once

// Scenario files: a YAML document describing the spin, the field program and
// the analysis to run.  See docs/scenario-format.md for the grammar.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spinevo/field.hpp"

namespace spinevo {

enum class AnalysisKind { propagate, eigen_family, rational, all_cyclic, verify_suite };

std::string_view to_string(AnalysisKind kind);

struct Tolerances {
  double sigma_tol = 1e-6;
  double k_tol = 1e-4;
  double rational_tol = 1e-6;
  double closure_tol = 1e-6;
  double scalar_tol = 1e-6;
  double pole_eps = 1e-7;

  bool operator==(const Tolerances&) const = default;
};

struct RationalParams {
  int twice_m = 0;
  std::vector<std::complex<double>> coefficients;
  int j_min = 0;
  int n = 1;
  int p = 1;

  bool operator==(const RationalParams&) const = default;
};

struct OutputPaths {
  std::string report;          // empty: standard output
  std::string trajectory_csv;  // empty: no dump

  bool operator==(const OutputPaths&) const = default;
};

struct Scenario {
  static constexpr int kVersion = 1;
  static constexpr int kDefaultSteps = 4096;
  static constexpr int kDefaultOracleSteps = 100000;

  int version = kVersion;
  int twice_s = 1;
  FieldProgram field = FieldProgram::zero(1.0);
  double tau = 1.0;
  int steps = kDefaultSteps;
  int oracle_steps = kDefaultOracleSteps;
  std::optional<Eigen::Vector3d> e0;
  std::uint64_t seed = 0;
  AnalysisKind analysis = AnalysisKind::propagate;
  RationalParams rational;
  std::vector<std::vector<std::complex<double>>> initial_states;
  Tolerances tolerances;
  OutputPaths output;

  bool operator==(const Scenario&) const = default;
};

/// Parses and validates a scenario document.  Amplitude lists within 1e-4 of
/// unit norm are renormalized and a warning is appended to `warnings`.
Scenario parse_scenario(std::string_view text, std::vector<std::string>* warnings = nullptr);

Scenario load_scenario(const std::string& path, std::vector<std::string>* warnings = nullptr);

/// YAML text that parses back to an identical Scenario.
std::string serialize_scenario(const Scenario& scenario);

/// Re-runs the cross-field validation (used after command-line overrides).
void validate_scenario(const Scenario& scenario);

}  // namespace spinevo
