#include "spinevo/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "spinevo/error.hpp"
#include "spinevo/spinalg.hpp"

namespace spinevo {

namespace {

std::string where(const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  if (mark.is_null()) return "";
  return " (line " + std::to_string(mark.line + 1) + ", column " + std::to_string(mark.column + 1) +
         ")";
}

[[noreturn]] void fail(ErrorCode code, const std::string& message, const YAML::Node& node) {
  throw Error(code, message + where(node));
}

void require_map(const YAML::Node& node, const std::string& name) {
  if (!node.IsMap()) fail(ErrorCode::configuration, "'" + name + "' must be a mapping", node);
}

void reject_unknown(const YAML::Node& node, const std::string& section,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& entry : node) {
    const auto key = entry.first.as<std::string>();
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) {
      fail(ErrorCode::unknown_key, "unknown key '" + key + "' in " + section, entry.first);
    }
  }
}

YAML::Node required(const YAML::Node& node, const std::string& key, const std::string& section) {
  YAML::Node child = node[key];
  if (!child) fail(ErrorCode::missing_key, "missing key '" + key + "' in " + section, node);
  return child;
}

double as_double(const YAML::Node& node, const std::string& name) {
  if (!node.IsScalar()) fail(ErrorCode::malformed_number, "'" + name + "' must be a number", node);
  double value = 0.0;
  if (!YAML::convert<double>::decode(node, value) || !std::isfinite(value)) {
    fail(ErrorCode::malformed_number,
         "'" + name + "' is not a finite number: '" + node.Scalar() + "'", node);
  }
  return value;
}

long long as_integer(const YAML::Node& node, const std::string& name) {
  if (!node.IsScalar()) fail(ErrorCode::malformed_number, "'" + name + "' must be an integer", node);
  long long value = 0;
  if (!YAML::convert<long long>::decode(node, value)) {
    fail(ErrorCode::malformed_number, "'" + name + "' is not an integer: '" + node.Scalar() + "'",
         node);
  }
  return value;
}

int as_int(const YAML::Node& node, const std::string& name) {
  const long long v = as_integer(node, name);
  if (v < INT32_MIN || v > INT32_MAX) fail(ErrorCode::malformed_number, "'" + name + "' overflows", node);
  return static_cast<int>(v);
}

std::vector<double> as_doubles(const YAML::Node& node, const std::string& name) {
  if (!node.IsSequence()) fail(ErrorCode::malformed_number, "'" + name + "' must be a list", node);
  std::vector<double> out;
  for (const auto& item : node) out.push_back(as_double(item, name));
  return out;
}

Eigen::Vector3d as_vector3(const YAML::Node& node, const std::string& name) {
  const auto v = as_doubles(node, name);
  if (v.size() != 3) fail(ErrorCode::malformed_number, "'" + name + "' must have 3 entries", node);
  return {v[0], v[1], v[2]};
}

Eigen::Vector3d as_unit_vector3(const YAML::Node& node, const std::string& name) {
  const Eigen::Vector3d v = as_vector3(node, name);
  if (!(std::abs(v.norm() - 1.0) <= 1e-9)) {
    fail(ErrorCode::non_unit_axis, "non-unit axis '" + name + "'", node);
  }
  return v;
}

// A complex amplitude is either a real number or a [re, im] pair.
std::complex<double> as_complex(const YAML::Node& node, const std::string& name) {
  if (node.IsSequence()) {
    const auto v = as_doubles(node, name);
    if (v.size() != 2) fail(ErrorCode::malformed_number, "'" + name + "' must be [re, im]", node);
    return {v[0], v[1]};
  }
  return {as_double(node, name), 0.0};
}

std::vector<std::complex<double>> as_amplitudes(const YAML::Node& node, const std::string& name,
                                                std::vector<std::string>* warnings) {
  if (!node.IsSequence()) fail(ErrorCode::malformed_number, "'" + name + "' must be a list", node);
  std::vector<std::complex<double>> amps;
  for (const auto& item : node) amps.push_back(as_complex(item, name));
  double norm2 = 0.0;
  for (const auto& a : amps) norm2 += std::norm(a);
  const double deviation = std::abs(std::sqrt(norm2) - 1.0);
  if (deviation > 1e-4) {
    fail(ErrorCode::configuration, "'" + name + "' is not normalized (norm " +
                                       std::to_string(std::sqrt(norm2)) + ")",
         node);
  }
  if (deviation > 1e-12) {
    const double scale = 1.0 / std::sqrt(norm2);
    for (auto& a : amps) a *= scale;
    if (deviation > 1e-8 && warnings) {
      warnings->push_back("renormalized '" + name + "'" + where(node));
    }
  }
  return amps;
}

ScalarProfile parse_profile(const YAML::Node& node, const std::string& name) {
  if (node.IsScalar()) return ScalarProfile::constant(as_double(node, name));
  require_map(node, name);
  reject_unknown(node, name, {"form", "coefficients"});
  const YAML::Node form_node = required(node, "form", name);
  const auto form = form_node.as<std::string>();
  ScalarProfile profile;
  if (form == "constant") profile.form = ScalarProfile::Form::constant;
  else if (form == "polynomial") profile.form = ScalarProfile::Form::polynomial;
  else if (form == "sinusoid") profile.form = ScalarProfile::Form::sinusoid;
  else if (form == "trig_series") profile.form = ScalarProfile::Form::trig_series;
  else fail(ErrorCode::configuration, "unknown profile form '" + form + "'", form_node);
  profile.coefficients = as_doubles(required(node, "coefficients", name), name + ".coefficients");
  try {
    profile.validate();
  } catch (const Error& e) {
    fail(e.code(), e.what(), node);
  }
  return profile;
}

FieldProgram parse_field(const YAML::Node& node, const std::string& section) {
  require_map(node, section);
  const YAML::Node kind_node = required(node, "kind", section);
  const auto kind = kind_node.as<std::string>();
  const double continuity_tol = node["continuity_tol"]
                                    ? as_double(node["continuity_tol"], "continuity_tol")
                                    : FieldProgram::kDefaultContinuityTol;
  const auto t_max = [&] { return as_double(required(node, "t_max", section), "t_max"); };

  try {
    if (kind == "fixed_axis") {
      reject_unknown(node, section, {"kind", "t_max", "continuity_tol", "axis", "omega"});
      return FieldProgram(FixedAxisField{as_unit_vector3(required(node, "axis", section), "axis"),
                                         parse_profile(required(node, "omega", section), "omega")},
                          t_max(), continuity_tol);
    }
    if (kind == "rotating") {
      reject_unknown(node, section,
                     {"kind", "t_max", "continuity_tol", "cone_angle", "rate", "omega_b0"});
      return FieldProgram(
          RotatingField{as_double(required(node, "cone_angle", section), "cone_angle"),
                        as_double(required(node, "rate", section), "rate"),
                        as_double(required(node, "omega_b0", section), "omega_b0")},
          t_max(), continuity_tol);
    }
    if (kind == "wobbling") {
      reject_unknown(node, section,
                     {"kind", "t_max", "continuity_tol", "omega", "polar", "azimuth"});
      return FieldProgram(
          WobblingField{parse_profile(required(node, "omega", section), "omega"),
                        parse_profile(required(node, "polar", section), "polar"),
                        parse_profile(required(node, "azimuth", section), "azimuth")},
          t_max(), continuity_tol);
    }
    if (kind == "sampled") {
      reject_unknown(node, section, {"kind", "t_max", "continuity_tol", "samples"});
      const YAML::Node samples = required(node, "samples", section);
      if (!samples.IsSequence()) fail(ErrorCode::configuration, "'samples' must be a list", samples);
      SampledField f;
      for (const auto& row : samples) {
        const auto v = as_doubles(row, "samples");
        if (v.size() != 5) {
          fail(ErrorCode::malformed_number, "each sample is [t, omega_b, nx, ny, nz]", row);
        }
        const Eigen::Vector3d n(v[2], v[3], v[4]);
        if (!(std::abs(n.norm() - 1.0) <= 1e-9)) {
          fail(ErrorCode::non_unit_axis, "non-unit axis in sample", row);
        }
        f.times.push_back(v[0]);
        f.omega.push_back(v[1]);
        f.axis.push_back(n);
      }
      return FieldProgram(std::move(f), t_max(), continuity_tol);
    }
    if (kind == "piecewise") {
      reject_unknown(node, section, {"kind", "continuity_tol", "segments"});
      const YAML::Node segments = required(node, "segments", section);
      if (!segments.IsSequence() || segments.size() == 0) {
        fail(ErrorCode::configuration, "'segments' must be a non-empty list", segments);
      }
      std::vector<double> durations;
      std::vector<FieldProgram> programs;
      for (std::size_t i = 0; i < segments.size(); ++i) {
        const YAML::Node seg = segments[i];
        const std::string name = section + ".segments[" + std::to_string(i) + "]";
        require_map(seg, name);
        reject_unknown(seg, name, {"duration", "field"});
        durations.push_back(as_double(required(seg, "duration", name), "duration"));
        programs.push_back(parse_field(required(seg, "field", name), name + ".field"));
      }
      return FieldProgram::piecewise(std::move(durations), std::move(programs), continuity_tol);
    }
  } catch (const Error& e) {
    // Errors raised with a location already carry one.
    const std::string message = e.what();
    if (message.find("(line ") != std::string::npos) throw;
    fail(e.code(), message, node);
  }
  fail(ErrorCode::unknown_field_kind, "unknown field kind '" + kind + "'", kind_node);
}

AnalysisKind parse_analysis_kind(const YAML::Node& node) {
  const auto kind = node.as<std::string>();
  if (kind == "propagate") return AnalysisKind::propagate;
  if (kind == "eigen_family") return AnalysisKind::eigen_family;
  if (kind == "rational") return AnalysisKind::rational;
  if (kind == "all_cyclic") return AnalysisKind::all_cyclic;
  if (kind == "verify_suite") return AnalysisKind::verify_suite;
  fail(ErrorCode::configuration, "unknown analysis kind '" + kind + "'", node);
}

void check_positive(double value, const std::string& name) {
  if (!(value > 0.0)) throw Error(ErrorCode::configuration, "'" + name + "' must be positive");
}

// Emitter helpers ---------------------------------------------------------

void emit_vector(YAML::Emitter& out, const Eigen::Vector3d& v) {
  out << YAML::Flow << YAML::BeginSeq << v.x() << v.y() << v.z() << YAML::EndSeq;
}

void emit_complex(YAML::Emitter& out, std::complex<double> c) {
  out << YAML::Flow << YAML::BeginSeq << c.real() << c.imag() << YAML::EndSeq;
}

void emit_profile(YAML::Emitter& out, const ScalarProfile& p) {
  out << YAML::BeginMap << YAML::Key << "form" << YAML::Value << std::string(to_string(p.form))
      << YAML::Key << "coefficients" << YAML::Value << YAML::Flow << p.coefficients << YAML::EndMap;
}

void emit_field(YAML::Emitter& out, const FieldProgram& program) {
  out << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << std::string(program.kind_name());
  const bool piecewise = std::holds_alternative<PiecewiseField>(program.definition());
  if (!piecewise) out << YAML::Key << "t_max" << YAML::Value << program.t_max();
  out << YAML::Key << "continuity_tol" << YAML::Value << program.continuity_tol();
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, FixedAxisField>) {
          out << YAML::Key << "axis" << YAML::Value;
          emit_vector(out, f.axis);
          out << YAML::Key << "omega" << YAML::Value;
          emit_profile(out, f.omega);
        } else if constexpr (std::is_same_v<T, RotatingField>) {
          out << YAML::Key << "cone_angle" << YAML::Value << f.cone_angle;
          out << YAML::Key << "rate" << YAML::Value << f.rate;
          out << YAML::Key << "omega_b0" << YAML::Value << f.omega_b0;
        } else if constexpr (std::is_same_v<T, WobblingField>) {
          out << YAML::Key << "omega" << YAML::Value;
          emit_profile(out, f.omega);
          out << YAML::Key << "polar" << YAML::Value;
          emit_profile(out, f.polar);
          out << YAML::Key << "azimuth" << YAML::Value;
          emit_profile(out, f.azimuth);
        } else if constexpr (std::is_same_v<T, SampledField>) {
          out << YAML::Key << "samples" << YAML::Value << YAML::BeginSeq;
          for (std::size_t i = 0; i < f.times.size(); ++i) {
            out << YAML::Flow << YAML::BeginSeq << f.times[i] << f.omega[i] << f.axis[i].x()
                << f.axis[i].y() << f.axis[i].z() << YAML::EndSeq;
          }
          out << YAML::EndSeq;
        } else {
          out << YAML::Key << "segments" << YAML::Value << YAML::BeginSeq;
          for (std::size_t i = 0; i < f.segments.size(); ++i) {
            out << YAML::BeginMap << YAML::Key << "duration" << YAML::Value << f.durations[i]
                << YAML::Key << "field" << YAML::Value;
            emit_field(out, f.segments[i]);
            out << YAML::EndMap;
          }
          out << YAML::EndSeq;
        }
      },
      program.definition());
  out << YAML::EndMap;
}

}  // namespace

std::string_view to_string(AnalysisKind kind) {
  switch (kind) {
    case AnalysisKind::propagate: return "propagate";
    case AnalysisKind::eigen_family: return "eigen_family";
    case AnalysisKind::rational: return "rational";
    case AnalysisKind::all_cyclic: return "all_cyclic";
    case AnalysisKind::verify_suite: return "verify_suite";
  }
  return "propagate";
}

void validate_scenario(const Scenario& sc) {
  if (sc.twice_s < 1 || sc.twice_s > kMaxTwiceS) {
    throw Error(ErrorCode::configuration, "twice_s must lie in [1, 40]");
  }
  if (sc.steps < 8) throw Error(ErrorCode::configuration, "steps must be at least 8");
  if (sc.oracle_steps < 64) throw Error(ErrorCode::configuration, "oracle_steps must be at least 64");
  check_positive(sc.tau, "tau");
  if (sc.tau > sc.field.t_max()) {
    throw Error(ErrorCode::configuration, "tau exceeds the field domain");
  }
  const Tolerances& t = sc.tolerances;
  for (auto [value, name] : {std::pair{t.sigma_tol, "sigma_tol"}, {t.k_tol, "k_tol"},
                             {t.rational_tol, "rational_tol"}, {t.closure_tol, "closure_tol"},
                             {t.scalar_tol, "scalar_tol"}, {t.pole_eps, "pole_eps"}}) {
    check_positive(value, name);
  }
  if (sc.analysis == AnalysisKind::rational) {
    if (sc.rational.coefficients.empty()) {
      throw Error(ErrorCode::missing_key, "rational analysis needs coefficients");
    }
    if (sc.rational.n < 1) throw Error(ErrorCode::configuration, "n must be at least 1");
  }
  for (const auto& state : sc.initial_states) {
    if (static_cast<int>(state.size()) != sc.twice_s + 1) {
      throw Error(ErrorCode::configuration, "initial state length must be 2s+1");
    }
  }
  if (sc.analysis == AnalysisKind::all_cyclic && sc.initial_states.empty()) {
    throw Error(ErrorCode::missing_key, "all_cyclic analysis needs initial_states");
  }
}

Scenario parse_scenario(std::string_view text, std::vector<std::string>* warnings) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::configuration, std::string("malformed document: ") + e.what());
  }
  if (!root.IsMap()) throw Error(ErrorCode::configuration, "scenario must be a mapping");
  reject_unknown(root, "scenario",
                 {"version", "twice_s", "field", "tau", "steps", "oracle_steps", "e0", "seed",
                  "analysis", "tolerances", "output"});

  Scenario sc;
  const YAML::Node version = required(root, "version", "scenario");
  sc.version = as_int(version, "version");
  if (sc.version != Scenario::kVersion) {
    fail(ErrorCode::configuration, "unsupported version " + std::to_string(sc.version), version);
  }
  sc.twice_s = as_int(required(root, "twice_s", "scenario"), "twice_s");
  sc.field = parse_field(required(root, "field", "scenario"), "field");
  sc.tau = as_double(required(root, "tau", "scenario"), "tau");
  if (root["steps"]) sc.steps = as_int(root["steps"], "steps");
  if (root["oracle_steps"]) sc.oracle_steps = as_int(root["oracle_steps"], "oracle_steps");
  if (root["e0"]) sc.e0 = as_unit_vector3(root["e0"], "e0");
  if (root["seed"]) {
    const long long seed = as_integer(root["seed"], "seed");
    if (seed < 0) fail(ErrorCode::configuration, "'seed' must be non-negative", root["seed"]);
    sc.seed = static_cast<std::uint64_t>(seed);
  }

  const YAML::Node analysis = required(root, "analysis", "scenario");
  require_map(analysis, "analysis");
  reject_unknown(analysis, "analysis",
                 {"kind", "m", "coefficients", "j_min", "n", "p", "initial_states"});
  sc.analysis = parse_analysis_kind(required(analysis, "kind", "analysis"));
  if (sc.analysis == AnalysisKind::rational) {
    const YAML::Node m = required(analysis, "m", "analysis");
    const double twice_m = 2.0 * as_double(m, "m");
    if (twice_m != std::round(twice_m)) fail(ErrorCode::configuration, "'m' must be a half-integer", m);
    sc.rational.twice_m = static_cast<int>(twice_m);
    sc.rational.coefficients =
        as_amplitudes(required(analysis, "coefficients", "analysis"), "coefficients", warnings);
    if (analysis["j_min"]) sc.rational.j_min = as_int(analysis["j_min"], "j_min");
    sc.rational.n = as_int(required(analysis, "n", "analysis"), "n");
    sc.rational.p = as_int(required(analysis, "p", "analysis"), "p");
  }
  if (const YAML::Node states = analysis["initial_states"]) {
    if (!states.IsSequence()) fail(ErrorCode::configuration, "'initial_states' must be a list", states);
    for (std::size_t i = 0; i < states.size(); ++i) {
      sc.initial_states.push_back(
          as_amplitudes(states[i], "initial_states[" + std::to_string(i) + "]", warnings));
    }
  }

  if (const YAML::Node tol = root["tolerances"]) {
    require_map(tol, "tolerances");
    reject_unknown(tol, "tolerances",
                   {"sigma_tol", "k_tol", "rational_tol", "closure_tol", "scalar_tol", "pole_eps"});
    auto read = [&](const char* key, double& slot) {
      if (tol[key]) slot = as_double(tol[key], key);
    };
    read("sigma_tol", sc.tolerances.sigma_tol);
    read("k_tol", sc.tolerances.k_tol);
    read("rational_tol", sc.tolerances.rational_tol);
    read("closure_tol", sc.tolerances.closure_tol);
    read("scalar_tol", sc.tolerances.scalar_tol);
    read("pole_eps", sc.tolerances.pole_eps);
  }
  if (const YAML::Node out = root["output"]) {
    require_map(out, "output");
    reject_unknown(out, "output", {"report", "trajectory_csv"});
    if (out["report"]) sc.output.report = out["report"].as<std::string>();
    if (out["trajectory_csv"]) sc.output.trajectory_csv = out["trajectory_csv"].as<std::string>();
  }

  validate_scenario(sc);
  return sc;
}

Scenario load_scenario(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open scenario file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), warnings);
}

std::string serialize_scenario(const Scenario& sc) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "version" << YAML::Value << sc.version;
  out << YAML::Key << "twice_s" << YAML::Value << sc.twice_s;
  out << YAML::Key << "tau" << YAML::Value << sc.tau;
  out << YAML::Key << "steps" << YAML::Value << sc.steps;
  out << YAML::Key << "oracle_steps" << YAML::Value << sc.oracle_steps;
  if (sc.e0) {
    out << YAML::Key << "e0" << YAML::Value;
    emit_vector(out, *sc.e0);
  }
  out << YAML::Key << "seed" << YAML::Value << sc.seed;
  out << YAML::Key << "field" << YAML::Value;
  emit_field(out, sc.field);

  out << YAML::Key << "analysis" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << std::string(to_string(sc.analysis));
  if (sc.analysis == AnalysisKind::rational) {
    out << YAML::Key << "m" << YAML::Value << 0.5 * sc.rational.twice_m;
    out << YAML::Key << "coefficients" << YAML::Value << YAML::BeginSeq;
    for (const auto& c : sc.rational.coefficients) emit_complex(out, c);
    out << YAML::EndSeq;
    out << YAML::Key << "j_min" << YAML::Value << sc.rational.j_min;
    out << YAML::Key << "n" << YAML::Value << sc.rational.n;
    out << YAML::Key << "p" << YAML::Value << sc.rational.p;
  }
  if (!sc.initial_states.empty()) {
    out << YAML::Key << "initial_states" << YAML::Value << YAML::BeginSeq;
    for (const auto& state : sc.initial_states) {
      out << YAML::Flow << YAML::BeginSeq;
      for (const auto& c : state) emit_complex(out, c);
      out << YAML::EndSeq;
    }
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;

  const Tolerances& t = sc.tolerances;
  out << YAML::Key << "tolerances" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "sigma_tol" << YAML::Value << t.sigma_tol;
  out << YAML::Key << "k_tol" << YAML::Value << t.k_tol;
  out << YAML::Key << "rational_tol" << YAML::Value << t.rational_tol;
  out << YAML::Key << "closure_tol" << YAML::Value << t.closure_tol;
  out << YAML::Key << "scalar_tol" << YAML::Value << t.scalar_tol;
  out << YAML::Key << "pole_eps" << YAML::Value << t.pole_eps;
  out << YAML::EndMap;

  if (!sc.output.report.empty() || !sc.output.trajectory_csv.empty()) {
    out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
    if (!sc.output.report.empty()) out << YAML::Key << "report" << YAML::Value << sc.output.report;
    if (!sc.output.trajectory_csv.empty()) {
      out << YAML::Key << "trajectory_csv" << YAML::Value << sc.output.trajectory_csv;
    }
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace spinevo
