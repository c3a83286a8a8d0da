#include "spinevo/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "spinevo/error.hpp"
#include "spinevo/propagate.hpp"

namespace spinevo {

namespace {

Json vector_json(const Eigen::Vector3d& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json complex_json(std::complex<double> c) { return Json::array({c.real(), c.imag()}); }

Json matrix_json(const CMatrixd& U) {
  Json rows = Json::array();
  for (int i = 0; i < U.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < U.cols(); ++j) row.push_back(complex_json(U(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json real_matrix_json(const Eigen::Matrix3d& E) {
  Json rows = Json::array();
  for (int i = 0; i < 3; ++i) rows.push_back(Json::array({E(i, 0), E(i, 1), E(i, 2)}));
  return rows;
}

Json profile_json(const ScalarProfile& p) {
  return {{"form", std::string(to_string(p.form))}, {"coefficients", p.coefficients}};
}

Json field_json(const FieldProgram& program) {
  Json j;
  j["kind"] = std::string(program.kind_name());
  j["t_max"] = program.t_max();
  j["continuity_tol"] = program.continuity_tol();
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, FixedAxisField>) {
          j["axis"] = vector_json(f.axis);
          j["omega"] = profile_json(f.omega);
        } else if constexpr (std::is_same_v<T, RotatingField>) {
          j["cone_angle"] = f.cone_angle;
          j["rate"] = f.rate;
          j["omega_b0"] = f.omega_b0;
        } else if constexpr (std::is_same_v<T, WobblingField>) {
          j["omega"] = profile_json(f.omega);
          j["polar"] = profile_json(f.polar);
          j["azimuth"] = profile_json(f.azimuth);
        } else if constexpr (std::is_same_v<T, SampledField>) {
          j["sample_count"] = f.times.size();
        } else {
          Json segments = Json::array();
          for (std::size_t i = 0; i < f.segments.size(); ++i) {
            segments.push_back({{"duration", f.durations[i]}, {"field", field_json(f.segments[i])}});
          }
          j["segments"] = std::move(segments);
        }
      },
      program.definition());
  return j;
}

Json scenario_json(const Scenario& sc) {
  Json j;
  j["version"] = sc.version;
  j["twice_s"] = sc.twice_s;
  j["tau"] = sc.tau;
  j["steps"] = sc.steps;
  j["oracle_steps"] = sc.oracle_steps;
  j["e0"] = sc.e0 ? vector_json(*sc.e0) : Json(nullptr);
  j["seed"] = sc.seed;
  j["analysis"] = std::string(to_string(sc.analysis));
  j["field"] = field_json(sc.field);
  const Tolerances& t = sc.tolerances;
  j["tolerances"] = {{"sigma_tol", t.sigma_tol},     {"k_tol", t.k_tol},
                     {"rational_tol", t.rational_tol}, {"closure_tol", t.closure_tol},
                     {"scalar_tol", t.scalar_tol},   {"pole_eps", t.pole_eps}};
  return j;
}

Json monodromy_json(const MonodromyResult& mono) {
  return {{"E", real_matrix_json(mono.E)},
          {"sigma", complex_json(mono.sigma)},
          {"axis_eta", vector_json(mono.axis_eta)},
          {"rotation_angle", mono.rotation_angle},
          {"identity_flag", mono.identity_flag},
          {"projection_delta", mono.projection_delta}};
}

Json cross_check_json(const CyclicReport& r) {
  return {{"gamma_check", r.gamma_check},
          {"gamma_difference", phase_distance(r.gamma, r.gamma_check)},
          {"beta_direct", r.beta_direct},
          {"delta_difference", phase_distance(r.delta, r.delta_spectroscopic)},
          {"alpha_tau", r.alpha_tau},
          {"e0", vector_json(r.e0)}};
}

CyclicOptions cyclic_options(const Scenario& sc) {
  CyclicOptions o;
  o.steps = sc.steps;
  o.sigma_tol = sc.tolerances.sigma_tol;
  o.k_tol = sc.tolerances.k_tol;
  o.rational_tol = sc.tolerances.rational_tol;
  o.closure_tol = sc.tolerances.closure_tol;
  o.scalar_tol = sc.tolerances.scalar_tol;
  o.precess.pole_eps = sc.tolerances.pole_eps;
  return o;
}

CVectord to_vector(const std::vector<std::complex<double>>& amps) {
  CVectord v(static_cast<Eigen::Index>(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i) v(static_cast<Eigen::Index>(i)) = amps[i];
  return v;
}

Eigen::Vector3d random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::Vector3d v;
  do {
    v = {normal(rng), normal(rng), normal(rng)};
  } while (v.norm() < 1e-3);
  return v.normalized();
}

// propagate ----------------------------------------------------------------

void run_propagate(const Scenario& sc, Json& results, Json& diagnostics) {
  const SpinRepd rep = build_spin_rep(sc.twice_s);
  const auto traj = scenario_trajectory(sc);
  const auto last = traj.last();
  const Propagator ua = propagator_closed_form(rep, traj, last, ClosedForm::tilt_first);
  const Propagator ub = propagator_closed_form(rep, traj, last, ClosedForm::rotation_last);
  const Propagator uo = oracle_propagator(rep, sc.field, sc.tau, sc.oracle_steps);

  double schrodinger = 0.0;
  for (int probe = 1; probe <= 8; ++probe) {
    const auto node = std::clamp<std::size_t>(last * probe / 9, 1, last - 1);
    const Propagator window[] = {propagator_closed_form(rep, traj, node - 1),
                                 propagator_closed_form(rep, traj, node),
                                 propagator_closed_form(rep, traj, node + 1)};
    schrodinger = std::max(schrodinger, schrodinger_residual(rep, sc.field, window));
  }
  double transport = 0.0;
  for (int i = 0; i < rep.dim; ++i) {
    transport = std::max(transport, transported_eigenstate_residual(rep, traj, last, rep.level(i)));
  }

  Json r;
  r["t"] = ua.t;
  r["alpha"] = ua.alpha;
  r["U"] = matrix_json(ua.U);
  r["unitarity_residual"] = unitarity_residual(ua.U);
  r["form_difference"] = max_abs(ua.U - ub.U);
  r["oracle_difference"] = max_abs(ua.U - uo.U);
  r["schrodinger_residual"] = schrodinger;
  r["transport_residual"] = transport;
  results.push_back(std::move(r));

  diagnostics["e0"] = vector_json(traj.e.front());
  diagnostics["norm_drift"] = traj.drift;
  diagnostics["pole_events"] = traj.pole_events.size();
  diagnostics["oracle_unitarity_residual"] = unitarity_residual(uo.U);
}

// cyclic analyses ----------------------------------------------------------

void run_cyclic(const Scenario& sc, Json& results, Json& diagnostics) {
  const SpinRepd rep = build_spin_rep(sc.twice_s);
  const CyclicOptions options = cyclic_options(sc);
  diagnostics["monodromy"] =
      monodromy_json(monodromy(sc.field, sc.tau, sc.steps, options.monodromy_options()));

  std::vector<CyclicReport> reports;
  switch (sc.analysis) {
    case AnalysisKind::eigen_family:
      reports = guaranteed_cyclic_family(rep, sc.field, sc.tau, options);
      break;
    case AnalysisKind::rational: {
      RationalSuperposition sup;
      sup.m = HalfInt{sc.rational.twice_m};
      sup.coeffs = sc.rational.coefficients;
      sup.j_min = sc.rational.j_min;
      sup.n = sc.rational.n;
      sup.p = sc.rational.p;
      reports.push_back(rational_superposition_family(rep, sc.field, sc.tau, sup, options));
      break;
    }
    case AnalysisKind::all_cyclic: {
      std::vector<CVectord> states;
      for (const auto& amps : sc.initial_states) states.push_back(to_vector(amps));
      reports = all_cyclic_analysis(rep, sc.field, sc.tau, states, options);
      const ScalarCheck scalar = check_scalar_propagator(rep, sc.field, sc.tau, options);
      diagnostics["scalar_propagator"] = {{"offdiagonal", scalar.offdiagonal},
                                          {"phase_spread", scalar.phase_spread},
                                          {"phase", complex_json(scalar.phase)}};
      break;
    }
    default:
      break;
  }
  Json checks = Json::array();
  for (const auto& r : reports) {
    results.push_back(cyclic_report_json(r));
    checks.push_back(cross_check_json(r));
  }
  diagnostics["cross_checks"] = std::move(checks);
}

// verify suite -------------------------------------------------------------

struct Battery {
  Json checks = Json::array();
  int passed = 0;
  int failed = 0;

  void add(const std::string& name, double value, double threshold) {
    const bool ok = std::isfinite(value) && value <= threshold;
    checks.push_back({{"name", name}, {"value", value}, {"threshold", threshold}, {"pass", ok}});
    (ok ? passed : failed) += 1;
  }
};

double rotation_conjugation_residual(const SpinRepd& rep, std::mt19937_64& rng, int draws) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  double worst = 0.0;
  for (int d = 0; d < draws; ++d) {
    const double xi = angle(rng);
    const Eigen::Vector3d b = random_unit(rng);
    const CMatrixd R = exp_i_spin(rep, xi, b);
    const CMatrixd sb = spin_dot(rep, b);
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector3d ek = Eigen::Vector3d::Unit(k);
      // component k of [s - (s.b) b] cos xi + (b x s) sin xi + (s.b) b
      const CMatrixd expected = (rep.generator(k) - sb * b(k)) * std::cos(xi) +
                                spin_dot(rep, ek.cross(b)) * std::sin(xi) + sb * b(k);
      worst = std::max(worst, max_abs(R * rep.generator(k) * R.adjoint() - expected));
    }
  }
  return worst;
}

int run_verify(const Scenario& sc, Json& results, Json& diagnostics) {
  const SpinRepd rep = build_spin_rep(sc.twice_s);
  std::mt19937_64 rng(sc.seed);
  Battery battery;
  const CMatrixd id = CMatrixd::Identity(rep.dim, rep.dim);
  const std::complex<double> i_unit(0.0, 1.0);

  double hermitian = 0.0;
  for (int k = 0; k < 3; ++k) {
    hermitian = std::max(hermitian, max_abs(rep.generator(k) - rep.generator(k).adjoint()));
  }
  battery.add("generators_hermitian", hermitian, 1e-14);
  double commutator = 0.0;
  for (int k = 0; k < 3; ++k) {
    const auto& a = rep.generator(k);
    const auto& b = rep.generator((k + 1) % 3);
    const auto& c = rep.generator((k + 2) % 3);
    commutator = std::max(commutator, max_abs(a * b - b * a - i_unit * c));
  }
  battery.add("commutation_relations", commutator, 1e-12);
  const double s = rep.s().value();
  battery.add("casimir",
              max_abs(rep.sx * rep.sx + rep.sy * rep.sy + rep.sz * rep.sz - s * (s + 1) * id),
              1e-12);
  battery.add("rotation_conjugation", rotation_conjugation_residual(rep, rng, 20), 1e-10);

  const CyclicOptions options = cyclic_options(sc);
  const MonodromyResult mono = monodromy(sc.field, sc.tau, sc.steps, options.monodromy_options());
  battery.add("monodromy_orthogonality",
              max_abs(mono.E.transpose() * mono.E - Eigen::Matrix3d::Identity()), 1e-9);
  battery.add("monodromy_determinant", std::abs(mono.E.determinant() - 1.0), 1e-9);

  const Eigen::Vector3d e_random = random_unit(rng);
  const auto traj = integrate_e(sc.field, e_random, sc.tau, sc.steps, options.precess);
  const auto anti = integrate_e(sc.field, -e_random, sc.tau, sc.steps, options.precess);
  battery.add("monodromy_linearity", max_abs(mono.E * e_random - traj.e.back()), 1e-7);
  double antipodal = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    antipodal = std::max(antipodal, max_abs(traj.e[i] + anti.e[i]));
  }
  battery.add("antipodal_symmetry", antipodal, 0.0);
  battery.add("norm_drift", traj.drift, 1e-8);

  const auto traj_z = integrate_e(sc.field, Eigen::Vector3d::UnitZ(), sc.tau, sc.steps, options.precess);
  const Propagator ua = propagator_closed_form(rep, traj, traj.last(), ClosedForm::tilt_first);
  const Propagator ub = propagator_closed_form(rep, traj, traj.last(), ClosedForm::rotation_last);
  const Propagator uz = propagator_closed_form(rep, traj_z, traj_z.last());
  const Propagator uo = oracle_propagator(rep, sc.field, sc.tau, sc.oracle_steps);
  battery.add("unitarity", unitarity_residual(ua.U), 1e-10);
  battery.add("form_equivalence", max_abs(ua.U - ub.U), 1e-10);
  battery.add("oracle_agreement", max_abs(ua.U - uo.U), 1e-6);
  battery.add("e0_independence", max_abs(ua.U - uz.U), 1e-6);

  double transport = 0.0;
  for (int c = 1; c <= 16; ++c) {
    const std::size_t node = traj.last() * static_cast<std::size_t>(c) / 17;
    for (int i = 0; i < rep.dim; ++i) {
      transport = std::max(transport, transported_eigenstate_residual(rep, traj, node, rep.level(i)));
    }
  }
  battery.add("eigenstate_transport", transport, 1e-7);

  const auto family = guaranteed_cyclic_family(rep, sc.field, sc.tau, options);
  double residual = 0.0;
  double delta_gap = 0.0;
  double gamma_gap = 0.0;
  double decomposition = 0.0;
  for (const auto& r : family) {
    decomposition =
        std::max(decomposition, phase_distance(r.gamma, r.delta_spectroscopic - r.beta));
    residual = std::max(residual, r.cyclicity_residual);
    delta_gap = std::max(delta_gap, phase_distance(r.delta, r.delta_spectroscopic));
    gamma_gap = std::max(gamma_gap, phase_distance(r.gamma, r.gamma_check));
  }
  battery.add("family_size_mismatch", std::abs(static_cast<double>(family.size()) - rep.dim), 0.0);
  battery.add("family_cyclicity", residual, 1e-6);
  battery.add("family_total_phase", delta_gap, 1e-6);
  battery.add("family_geometric_phase", gamma_gap, 1e-6);
  battery.add("family_phase_decomposition", decomposition, 1e-6);

  results = std::move(battery.checks);
  diagnostics["passed"] = battery.passed;
  diagnostics["failed"] = battery.failed;
  diagnostics["monodromy"] = monodromy_json(mono);
  return battery.failed == 0 ? exit_code::success : exit_code::error;
}

// JSON writer --------------------------------------------------------------

void write_number(std::ostream& out, double x) {
  if (!std::isfinite(x)) {
    out << "null";
    return;
  }
  if (x == 0.0) x = 0.0;  // no negative zero
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  out << buffer;
}

void write_json(std::ostream& out, const Json& v, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out << "{}";
        return;
      }
      out << '{';
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) out << ',';
        first = false;
        newline(depth + 1);
        out << Json(key).dump() << (indent < 0 ? ":" : ": ");
        write_json(out, item, indent, depth + 1);
      }
      newline(depth);
      out << '}';
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out << "[]";
        return;
      }
      // Short numeric rows stay on one line.
      const bool flat = std::all_of(v.begin(), v.end(), [](const Json& x) {
        return x.is_number() || x.is_null() || (x.is_array() && x.size() <= 2 &&
                                                std::all_of(x.begin(), x.end(),
                                                            [](const Json& y) { return y.is_number(); }));
      });
      out << '[';
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << (flat ? ", " : ",");
        if (!flat) newline(depth + 1);
        write_json(out, v[i], flat ? -1 : indent, depth + 1);
      }
      if (!flat) newline(depth);
      out << ']';
      return;
    }
    case Json::value_t::number_float:
      write_number(out, v.get<double>());
      return;
    default:
      out << v.dump();
      return;
  }
}

}  // namespace

Json cyclic_report_json(const CyclicReport& r) {
  const auto optional_number = [](const auto& x) { return x ? Json(*x) : Json(nullptr); };
  return {{"kind", std::string(to_string(r.kind))},
          {"m_or_v0", r.m_or_v0},
          {"delta", r.delta},
          {"beta", r.beta},
          {"gamma", r.gamma},
          {"omega_e", optional_number(r.omega_e)},
          {"omega_v", optional_number(r.omega_v)},
          {"K", optional_number(r.K)},
          {"k", optional_number(r.k)},
          {"cyclicity_residual", r.cyclicity_residual},
          {"delta_spectroscopic", r.delta_spectroscopic}};
}

PrecessionTrajectory scenario_trajectory(const Scenario& sc) {
  PrecessOptions options;
  options.pole_eps = sc.tolerances.pole_eps;
  return integrate_e(sc.field, sc.e0.value_or(Eigen::Vector3d::UnitZ()), sc.tau, sc.steps, options);
}

Json error_report(const Error& error) {
  return {{"error", {{"code", std::string(to_string(error.code()))}, {"message", error.what()}}}};
}

RunOutcome run(const Scenario& scenario, const std::vector<std::string>& warnings) {
  RunOutcome outcome;
  Json results = Json::array();
  Json diagnostics = Json::object();
  diagnostics["warnings"] = warnings;
  try {
    switch (scenario.analysis) {
      case AnalysisKind::propagate:
        run_propagate(scenario, results, diagnostics);
        break;
      case AnalysisKind::eigen_family:
      case AnalysisKind::rational:
      case AnalysisKind::all_cyclic:
        run_cyclic(scenario, results, diagnostics);
        break;
      case AnalysisKind::verify_suite:
        outcome.exit_code = run_verify(scenario, results, diagnostics);
        break;
    }
  } catch (const Error& e) {
    outcome.exit_code =
        e.code() == ErrorCode::not_applicable ? exit_code::not_applicable : exit_code::error;
    outcome.report = error_report(e);
  }
  Json report;
  report["scenario"] = scenario_json(scenario);
  report["results"] = std::move(results);
  report["diagnostics"] = std::move(diagnostics);
  if (outcome.report.contains("error")) report["error"] = outcome.report["error"];
  outcome.report = std::move(report);
  return outcome;
}

std::string dump_json(const Json& value, int indent) {
  std::ostringstream out;
  write_json(out, value, indent, 0);
  out << '\n';
  return out.str();
}

void write_file_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path temp = target;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot write '" + temp.string() + "'");
    out << content;
    if (!out.flush()) throw Error(ErrorCode::io, "failed writing '" + temp.string() + "'");
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) throw Error(ErrorCode::io, "cannot rename onto '" + path + "': " + ec.message());
}

}  // namespace spinevo
