#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "spinevo/error.hpp"
#include "spinevo/runner.hpp"

using namespace spinevo;

namespace {

Scenario base_scenario(FieldProgram field, double tau, int twice_s, AnalysisKind kind) {
  Scenario sc;
  sc.twice_s = twice_s;
  sc.field = std::move(field);
  sc.tau = tau;
  sc.analysis = kind;
  sc.oracle_steps = 20000;
  return sc;
}

const std::vector<std::string> kReportKeys = {
    "kind",    "m_or_v0", "delta", "beta", "gamma",           "omega_e",
    "omega_v", "K",       "k",     "cyclicity_residual", "delta_spectroscopic"};

}  // namespace

TEST_CASE("zero-field propagation is the identity") {
  const auto sc = base_scenario(FieldProgram::zero(2.0), 2.0, 2, AnalysisKind::propagate);
  const RunOutcome out = run(sc);
  CHECK(out.exit_code == exit_code::success);
  const Json& r = out.report["results"][0];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(r["U"][i][j][0].get<double>() - (i == j ? 1.0 : 0.0)) < 1e-15);
      CHECK(std::abs(r["U"][i][j][1].get<double>()) < 1e-15);
    }
  }
  for (const char* key : {"unitarity_residual", "form_difference", "oracle_difference",
                          "schrodinger_residual", "transport_residual"}) {
    CAPTURE(key);
    CHECK(r[key].get<double>() < 1e-12);
  }
}

TEST_CASE("report wrapper and per-report keys") {
  const auto sc = base_scenario(FieldProgram::rotating(std::numbers::pi / 3, 0.7, 1.3, 7.0), 7.0, 1,
                                AnalysisKind::eigen_family);
  const RunOutcome out = run(sc);
  REQUIRE(out.exit_code == exit_code::success);
  std::vector<std::string> top;
  for (const auto& [key, value] : out.report.items()) top.push_back(key);
  CHECK(top == std::vector<std::string>{"scenario", "results", "diagnostics"});
  CHECK(out.report["scenario"]["steps"] == 4096);
  CHECK(out.report["scenario"]["tolerances"]["sigma_tol"] == 1e-6);
  REQUIRE(out.report["results"].size() == 2);
  for (const auto& r : out.report["results"]) {
    std::vector<std::string> keys;
    for (const auto& [key, value] : r.items()) keys.push_back(key);
    CHECK(keys == kReportKeys);
    CHECK(r["k"].is_null());
    const double gamma = r["gamma"].get<double>();
    const double omega_v = r["omega_v"].get<double>();
    const double d = std::remainder(gamma + omega_v / 2, 2 * std::numbers::pi);
    CHECK(std::abs(d) < 1e-6);
  }
}

TEST_CASE("exit codes") {
  SUBCASE("not applicable") {
    const auto sc = base_scenario(FieldProgram::fixed_axis({0, 0, 1}, ScalarProfile::constant(1.0), 3.0),
                                  3.0, 2, AnalysisKind::all_cyclic);
    const RunOutcome out = run(sc);
    CHECK(out.exit_code == exit_code::not_applicable);
    CHECK(out.report["error"]["code"] == "not_applicable");
    CHECK(out.report["results"].empty());
  }
  SUBCASE("module error") {
    auto sc = base_scenario(FieldProgram::fixed_axis({0, 0, 1}, ScalarProfile::constant(1.0), 4.0), 4.0,
                            2, AnalysisKind::rational);
    sc.rational = {0, {0.5}, 0, 1, 1};  // not normalized
    sc.tau = std::numbers::pi;
    const RunOutcome out = run(sc);
    CHECK(out.exit_code == exit_code::error);
    CHECK(out.report["error"]["code"] == "precondition");
  }
  SUBCASE("verify suite passes") {
    auto sc = base_scenario(FieldProgram::rotating(0.9, 0.5, 1.1, 5.0), 5.0, 3,
                            AnalysisKind::verify_suite);
    sc.oracle_steps = 100000;
    const RunOutcome out = run(sc);
    CHECK(out.exit_code == exit_code::success);
    CHECK(out.report["diagnostics"]["failed"] == 0);
    CHECK(out.report["diagnostics"]["passed"].get<int>() == static_cast<int>(out.report["results"].size()));
  }
  SUBCASE("verify suite failure maps to 1") {
    auto sc = base_scenario(FieldProgram::rotating(0.9, 0.5, 1.1, 5.0), 5.0, 3,
                            AnalysisKind::verify_suite);
    sc.oracle_steps = 64;  // far too coarse for the oracle agreement check
    const RunOutcome out = run(sc);
    CHECK(out.exit_code == exit_code::error);
    CHECK(out.report["diagnostics"]["failed"].get<int>() >= 1);
  }
}

TEST_CASE("JSON writer") {
  Json j;
  j["a"] = 0.1;
  j["b"] = -0.0;
  j["c"] = std::numeric_limits<double>::quiet_NaN();
  j["d"] = Json::array({1.0 / 3.0, 2});
  j["e"] = nullptr;
  j["f"] = "text";
  const std::string text = dump_json(j);
  CHECK(text.find("\"a\": 0.10000000000000001") != std::string::npos);
  CHECK(text.find("\"b\": 0,") != std::string::npos);
  CHECK(text.find("\"c\": null") != std::string::npos);
  CHECK(text.find("[0.33333333333333331, 2]") != std::string::npos);
  CHECK(Json::parse(text)["d"][0].get<double>() == 1.0 / 3.0);
  CHECK(dump_json(j) == text);
}

TEST_CASE("repeated runs are byte-identical") {
  auto sc = base_scenario(FieldProgram::rotating(0.9, 0.5, 1.1, 5.0), 5.0, 2, AnalysisKind::propagate);
  sc.steps = 512;
  sc.oracle_steps = 2000;
  CHECK(dump_json(run(sc).report) == dump_json(run(sc).report));
}

TEST_CASE("atomic file writes") {
  const auto dir = std::filesystem::temp_directory_path() / "spinevo_runner_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "report.json").string();
  write_file_atomically(path, "first\n");
  write_file_atomically(path, "second\n");
  std::ifstream in(path);
  std::stringstream content;
  content << in.rdbuf();
  CHECK(content.str() == "second\n");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  try {
    write_file_atomically((dir / "missing" / "x.json").string(), "x");
    FAIL("write into a missing directory succeeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io);
  }
  std::filesystem::remove_all(dir);
}
