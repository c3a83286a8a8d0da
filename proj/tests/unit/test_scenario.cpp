#include <doctest.h>

#include <string>

#include "spinevo/error.hpp"
#include "spinevo/scenario.hpp"

using namespace spinevo;

namespace {

const char* kMinimal = R"(version: 1
twice_s: 1
field:
  kind: fixed_axis
  axis: [0, 0, 1]
  omega: 2.0
  t_max: 3
tau: 3
analysis:
  kind: propagate
)";

const char* kRational = R"(version: 1
twice_s: 4
field:
  kind: piecewise
  segments:
    - duration: 1.5
      field:
        kind: rotating
        cone_angle: 0.0
        rate: 0.7
        omega_b0: 1.25
        t_max: 1.5
    - duration: 0.25
      field:
        kind: wobbling
        omega: {form: constant, coefficients: [1.25]}
        polar: {form: polynomial, coefficients: [0.0, 0.0, 0.3]}
        azimuth: {form: trig_series, coefficients: [0.1, 0.2, 0.3, 1.7, 0.4]}
        t_max: 0.25
    - duration: 1.0
      field:
        kind: sampled
        samples:
          - [0.0, 1.25, 0.0, 0.0, 1.0]
          - [1.0, 1.5, 0.6, 0.0, 0.8]
        t_max: 1.0
  continuity_tol: 0.05
tau: 2.5
steps: 2048
oracle_steps: 5000
e0: [0.6, 0.0, 0.8]
seed: 42
analysis:
  kind: rational
  m: -1
  n: 1
  p: 3
  j_min: 0
  coefficients: [[0.6, 0.0], [0.0, 0.8]]
tolerances:
  sigma_tol: 2.0e-6
  k_tol: 3.0e-4
  rational_tol: 0.1
  pole_eps: 1.0e-9
output:
  report: out/report.json
  trajectory_csv: out/trajectory.csv
)";

ErrorCode parse_error(const std::string& text, std::string* message = nullptr) {
  try {
    parse_scenario(text);
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  FAIL("parsed without error:\n" << text);
  return ErrorCode::precondition;
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("minimal scenario gets defaults") {
  const Scenario sc = parse_scenario(kMinimal);
  CHECK(sc.version == 1);
  CHECK(sc.twice_s == 1);
  CHECK(sc.steps == 4096);
  CHECK(sc.oracle_steps == 100000);
  CHECK(sc.analysis == AnalysisKind::propagate);
  CHECK_FALSE(sc.e0.has_value());
  CHECK(sc.tolerances == Tolerances{});
  CHECK(sc.field == FieldProgram::fixed_axis({0, 0, 1}, ScalarProfile::constant(2.0), 3.0));
  CHECK(sc.output.report.empty());
}

TEST_CASE("full scenario parses") {
  const Scenario sc = parse_scenario(kRational);
  CHECK(sc.twice_s == 4);
  CHECK(sc.field.kind_name() == "piecewise");
  CHECK(sc.field.t_max() == doctest::Approx(2.75));
  CHECK(sc.rational.twice_m == -2);
  CHECK(sc.rational.p == 3);
  CHECK(sc.rational.coefficients[1] == std::complex<double>(0.0, 0.8));
  CHECK(sc.tolerances.k_tol == 3e-4);
  CHECK(sc.tolerances.scalar_tol == 1e-6);
  CHECK(sc.seed == 42);
  CHECK(sc.output.trajectory_csv == "out/trajectory.csv");
}

TEST_CASE("serialize then parse gives the same scenario") {
  for (const char* text : {kMinimal, kRational}) {
    const Scenario sc = parse_scenario(text);
    const std::string yaml = serialize_scenario(sc);
    CAPTURE(yaml);
    CHECK(parse_scenario(yaml) == sc);
    CHECK(serialize_scenario(parse_scenario(yaml)) == yaml);
  }
  Scenario sc = parse_scenario(kMinimal);
  sc.analysis = AnalysisKind::all_cyclic;
  sc.initial_states = {{{0.6, 0.0}, {0.0, 0.8}}, {{1.0 / 3.0, 0.1}, {0.0, 0.0}}};
  sc.initial_states[1][1] = std::sqrt(1.0 - std::norm(sc.initial_states[1][0]));
  CHECK(parse_scenario(serialize_scenario(sc)) == sc);
}

TEST_CASE("distinct error codes") {
  CHECK(parse_error(replace(kMinimal, "axis: [0, 0, 1]", "axis: [0, 0, 2]")) ==
        ErrorCode::non_unit_axis);
  CHECK(parse_error(replace(kMinimal, "tau: 3\n", "")) == ErrorCode::missing_key);
  CHECK(parse_error(replace(kMinimal, "omega: 2.0", "omega: 2.0x")) == ErrorCode::malformed_number);
  CHECK(parse_error(replace(kMinimal, "kind: fixed_axis", "kind: spiral")) ==
        ErrorCode::unknown_field_kind);
  CHECK(parse_error(replace(kMinimal, "tau: 3", "tau: 3\ncolour: blue")) == ErrorCode::unknown_key);
  CHECK(parse_error(replace(kMinimal, "version: 1", "version: 2")) == ErrorCode::configuration);
  CHECK(parse_error(replace(kMinimal, "tau: 3", "tau: 3\nsteps: 4")) == ErrorCode::configuration);
  CHECK(parse_error(replace(kMinimal, "tau: 3", "tau: 4")) == ErrorCode::configuration);
  CHECK(parse_error("[1, 2") == ErrorCode::configuration);
}

TEST_CASE("errors carry the location") {
  std::string message;
  parse_error(replace(kMinimal, "  t_max: 3", "  t_max: 3\n  wobble: 1"), &message);
  CHECK(message.find("wobble") != std::string::npos);
  CHECK(message.find("line 8") != std::string::npos);
  parse_error(replace(kMinimal, "axis: [0, 0, 1]", "axis: [0, 0, 2]"), &message);
  CHECK(message.find("non-unit axis") != std::string::npos);
  CHECK(message.find("line 5") != std::string::npos);
}

TEST_CASE("amplitude normalization") {
  const std::string base = replace(kMinimal, "kind: propagate",
                                   "kind: all_cyclic\n  initial_states:\n    - [0.6, 0.80003]");
  std::vector<std::string> warnings;
  const Scenario sc = parse_scenario(base, &warnings);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("renormalized") != std::string::npos);
  double norm2 = 0.0;
  for (const auto& a : sc.initial_states[0]) norm2 += std::norm(a);
  CHECK(std::abs(norm2 - 1.0) < 1e-12);

  warnings.clear();
  parse_scenario(replace(base, "0.80003", "0.8"), &warnings);
  CHECK(warnings.empty());
  CHECK(parse_error(replace(base, "0.80003", "0.9")) == ErrorCode::configuration);
}
