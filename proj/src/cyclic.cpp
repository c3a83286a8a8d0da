#include "spinevo/cyclic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "spinevo/error.hpp"
#include "spinevo/propagate.hpp"

namespace spinevo {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Everything a report needs from the trajectory started at e0.
struct Loop {
  PrecessionTrajectory traj;
  SolidAngle trace;
  CMatrixd U;

  double alpha() const { return traj.alpha(traj.last()); }
  double alpha_dyn() const { return traj.alpha_dyn.back(); }
};

Loop close_loop(const SpinRepd& rep, const FieldProgram& program, double tau,
                const Eigen::Vector3d& e0, const CyclicOptions& options) {
  Loop loop;
  loop.traj = integrate_e(program, e0, tau, options.steps, options.precess);
  loop.trace = solid_angle(loop.traj, options.closure_tol);
  loop.U = propagator_closed_form(rep, loop.traj, loop.traj.last()).U;
  return loop;
}

/// Solid angle of the antipodal trace -e(t), integrated directly.
double antipodal_solid_angle(const FieldProgram& program, double tau, const Eigen::Vector3d& e0,
                             const CyclicOptions& options) {
  const auto traj = integrate_e(program, -e0, tau, options.steps, options.precess);
  return solid_angle(traj, options.closure_tol).omega;
}

void fill_spectroscopy(CyclicReport& r, const CMatrixd& U) {
  const CVectord& psi0 = r.initial_state;
  const CVectord psi = U * psi0;
  r.delta_spectroscopic = wrap_phase(std::arg(psi0.dot(psi)));
  r.cyclicity_residual = (psi - std::polar(1.0, r.delta) * psi0).norm();
}

Eigen::Vector3d loop_axis(const MonodromyResult& mono) {
  return mono.identity_flag ? Eigen::Vector3d::UnitZ() : mono.axis_eta;
}

}  // namespace

double wrap_phase(double angle) {
  double r = std::remainder(angle, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

double phase_distance(double a, double b) { return std::abs(wrap_phase(a - b)); }

std::string_view to_string(CyclicKind kind) {
  switch (kind) {
    case CyclicKind::eigen_family: return "eigen_family";
    case CyclicKind::rational_superposition: return "rational_superposition";
    case CyclicKind::all_cyclic: return "all_cyclic";
  }
  return "eigen_family";
}

MonodromyOptions CyclicOptions::monodromy_options() const {
  MonodromyOptions m;
  m.sigma_tol = sigma_tol;
  m.precess = precess;
  return m;
}

std::vector<CyclicReport> guaranteed_cyclic_family(const SpinRepd& rep, const FieldProgram& program,
                                                   double tau, const CyclicOptions& options) {
  const MonodromyResult mono = monodromy(program, tau, options.steps, options.monodromy_options());
  const Eigen::Vector3d e0 = loop_axis(mono);
  const Loop loop = close_loop(rep, program, tau, e0, options);
  const double omega_e = loop.trace.omega;
  const double omega_anti = antipodal_solid_angle(program, tau, e0, options);
  const double alpha = loop.alpha();

  std::vector<CyclicReport> reports;
  reports.reserve(static_cast<std::size_t>(rep.dim));
  for (int i = 0; i < rep.dim; ++i) {
    const HalfInt level = rep.level(i);
    const double m = level.value();
    CyclicReport r;
    r.kind = CyclicKind::eigen_family;
    r.m_or_v0 = m;
    r.e0 = e0;
    r.alpha_tau = alpha;
    r.initial_state = eigenstate_of_spin_dot(rep, e0, level);
    r.delta = wrap_phase(m * alpha);
    r.beta = m * loop.alpha_dyn();
    r.beta_direct = r.beta;
    r.gamma = wrap_phase(-m * omega_e);
    r.omega_e = omega_e;
    r.K = loop.trace.winding;
    // v = m e traces e for m > 0 and the antipodal curve for m < 0.
    if (level.twice != 0) {
      r.omega_v = level.twice > 0 ? omega_e : omega_anti;
      r.gamma_check = wrap_phase(-std::abs(m) * *r.omega_v);
    } else {
      r.gamma_check = 0.0;
    }
    fill_spectroscopy(r, loop.U);
    reports.push_back(std::move(r));
  }
  return reports;
}

CyclicReport rational_superposition_family(const SpinRepd& rep, const FieldProgram& program,
                                           double tau, const RationalSuperposition& sup,
                                           const CyclicOptions& options) {
  if (sup.n < 1) throw Error(ErrorCode::precondition, "n must be a natural number");
  if (sup.n == 1 && sup.p % 2 == 0) {
    throw Error(ErrorCode::precondition, "p must be odd when n = 1");
  }
  if (sup.n > 1 && std::gcd(sup.p, sup.n) != 1) {
    throw Error(ErrorCode::precondition, "p and n must be coprime");
  }
  if (rep.twice_s < 2 * sup.n) {
    throw Error(ErrorCode::precondition, "no superposition cyclic states exist for s < n");
  }
  if (sup.coeffs.empty()) throw Error(ErrorCode::precondition, "no coefficients given");
  double norm2 = 0.0;
  for (const auto& c : sup.coeffs) norm2 += std::norm(c);
  if (!(std::abs(norm2 - 1.0) <= 1e-10)) {
    throw Error(ErrorCode::precondition, "coefficients are not normalized");
  }
  std::vector<HalfInt> levels;
  for (std::size_t j = 0; j < sup.coeffs.size(); ++j) {
    const HalfInt level{sup.m.twice + 4 * sup.n * (sup.j_min + static_cast<int>(j))};
    if (!rep.in_ladder(level)) {
      throw Error(ErrorCode::precondition,
                  "level " + std::to_string(level.value()) + " outside [-s, s]");
    }
    levels.push_back(level);
  }

  const MonodromyResult mono = monodromy(program, tau, options.steps, options.monodromy_options());
  const Eigen::Vector3d e0 = loop_axis(mono);
  const Loop loop = close_loop(rep, program, tau, e0, options);
  const double alpha = loop.alpha();
  const double target = sup.p * kPi / sup.n;
  if (!(std::abs(alpha - target) <= options.rational_tol)) {
    throw Error(ErrorCode::not_applicable, "alpha(tau) = " + std::to_string(alpha) +
                                               " does not match p pi / n = " +
                                               std::to_string(target));
  }

  CyclicReport r;
  r.kind = CyclicKind::rational_superposition;
  r.e0 = e0;
  r.alpha_tau = alpha;
  r.initial_state = CVectord::Zero(rep.dim);
  double v0 = 0.0;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    r.initial_state += sup.coeffs[j] * eigenstate_of_spin_dot(rep, e0, levels[j]);
    v0 += levels[j].value() * std::norm(sup.coeffs[j]);
  }
  if (std::abs(v0) < options.v_zero_tol) v0 = 0.0;
  r.m_or_v0 = v0;

  const double m = sup.m.value();
  const double omega_e = loop.trace.omega;
  const int K = loop.trace.winding;
  r.omega_e = omega_e;
  r.K = K;
  r.delta = wrap_phase(m * alpha);
  r.beta = v0 * (alpha + omega_e);
  r.beta_direct = v0 * loop.alpha_dyn();

  double gamma = 2.0 * kPi * K * (std::abs(v0) - v0) + (m - v0) * target;
  if (v0 != 0.0) {
    r.omega_v = v0 > 0.0 ? omega_e : antipodal_solid_angle(program, tau, e0, options);
    gamma -= std::abs(v0) * *r.omega_v;
  }
  r.gamma = wrap_phase(gamma);
  fill_spectroscopy(r, loop.U);
  r.gamma_check = wrap_phase(r.delta_spectroscopic - r.beta_direct);
  return r;
}

ScalarCheck check_scalar_propagator(const SpinRepd& rep, const FieldProgram& program, double tau,
                                    const CyclicOptions& options) {
  const auto traj = integrate_e(program, Eigen::Vector3d::UnitZ(), tau, options.steps, options.precess);
  const CMatrixd U = propagator_closed_form(rep, traj, traj.last()).U;
  ScalarCheck check;
  for (int i = 0; i < rep.dim; ++i) {
    for (int j = 0; j < rep.dim; ++j) {
      if (i != j) check.offdiagonal = std::max(check.offdiagonal, std::abs(U(i, j)));
    }
  }
  for (int i = 0; i < rep.dim; ++i) {
    for (int j = i + 1; j < rep.dim; ++j) {
      check.phase_spread =
          std::max(check.phase_spread, phase_distance(std::arg(U(i, i)), std::arg(U(j, j))));
    }
  }
  check.phase = U(0, 0);
  return check;
}

std::vector<CyclicReport> all_cyclic_analysis(const SpinRepd& rep, const FieldProgram& program,
                                              double tau,
                                              const std::vector<CVectord>& initial_states,
                                              const CyclicOptions& options) {
  const MonodromyResult mono = monodromy(program, tau, options.steps, options.monodromy_options());
  if (!mono.identity_flag) {
    throw Error(ErrorCode::not_applicable,
                "monodromy is not the identity (rotation angle " +
                    std::to_string(mono.rotation_angle) + ")");
  }
  const ScalarCheck scalar = check_scalar_propagator(rep, program, tau, options);
  if (scalar.offdiagonal > options.scalar_tol || scalar.phase_spread > options.scalar_tol) {
    throw Error(ErrorCode::accuracy, "U(tau) is not scalar (off-diagonal " +
                                         std::to_string(scalar.offdiagonal) + ", phase spread " +
                                         std::to_string(scalar.phase_spread) + ")");
  }

  const double s = rep.s().value();
  std::vector<CyclicReport> reports;
  for (const CVectord& psi0 : initial_states) {
    if (psi0.size() != rep.dim) {
      throw Error(ErrorCode::precondition, "initial state has wrong dimension");
    }
    if (!(std::abs(psi0.norm() - 1.0) <= 1e-8)) {
      throw Error(ErrorCode::precondition, "initial state is not normalized");
    }
    CyclicReport r;
    r.kind = CyclicKind::all_cyclic;
    r.initial_state = psi0;
    const Eigen::Vector3d v = spin_expectation(rep, psi0);
    const double v0 = v.norm() < options.v_zero_tol ? 0.0 : v.norm();
    r.e0 = v0 > 0.0 ? Eigen::Vector3d(v / v0) : Eigen::Vector3d::UnitZ();
    r.m_or_v0 = v0;

    const Loop loop = close_loop(rep, program, tau, r.e0, options);
    const double alpha = loop.alpha();
    r.alpha_tau = alpha;
    r.k_raw = alpha / kTwoPi;
    const double k_snapped = std::round(r.k_raw);
    if (!(std::abs(r.k_raw - k_snapped) <= options.k_tol)) {
      throw Error(ErrorCode::accuracy,
                  "alpha(tau) / 2 pi = " + std::to_string(r.k_raw) + " is not an integer");
    }
    const int k = static_cast<int>(k_snapped);
    r.k = k;
    r.K = loop.trace.winding;
    r.omega_e = loop.trace.omega;
    r.delta = wrap_phase(kTwoPi * k * s);
    r.beta_direct = v0 * loop.alpha_dyn();

    double gamma = (s - v0) * kTwoPi * k;
    if (v0 > 0.0) {
      r.omega_v = loop.trace.omega;
      r.beta = v0 * (alpha + *r.omega_v);
      gamma -= v0 * *r.omega_v;
    }
    r.gamma = wrap_phase(gamma);
    fill_spectroscopy(r, loop.U);
    r.gamma_check = wrap_phase(r.delta_spectroscopic - r.beta_direct);
    reports.push_back(std::move(r));
  }
  return reports;
}

AlphaSensitivity alpha_sensitivity(const SpinRepd& rep, const FieldProgram& program, double tau,
                                   const Eigen::Vector3d& e0, const Eigen::Vector3d& delta_e0,
                                   const CyclicOptions& options) {
  if (!(std::abs(delta_e0.dot(e0)) <= 1e-12 + 1e-9 * delta_e0.norm())) {
    throw Error(ErrorCode::precondition, "perturbation must be orthogonal to e0");
  }
  const MonodromyResult mono = monodromy(program, tau, options.steps, options.monodromy_options());
  if (!mono.identity_flag) {
    throw Error(ErrorCode::not_applicable, "alpha sensitivity needs an all-cyclic interval");
  }

  const auto alpha_from = [&](const Eigen::Vector3d& start) {
    return integrate_e(program, start.normalized(), tau, options.steps, options.precess);
  };
  const auto base = alpha_from(e0);
  const auto moved = alpha_from(e0 + delta_e0);
  const auto half = alpha_from(e0 + 0.5 * delta_e0);

  AlphaSensitivity out;
  out.alpha = base.alpha(base.last());
  out.alpha_perturbed = moved.alpha(moved.last());
  out.delta_alpha = out.alpha_perturbed - out.alpha;
  out.delta_alpha_half = half.alpha(half.last()) - out.alpha;
  out.k = static_cast<int>(std::lround(out.alpha / kTwoPi));
  out.k_perturbed = static_cast<int>(std::lround(out.alpha_perturbed / kTwoPi));
  const double multiple = out.delta_alpha / (2.0 * kTwoPi);
  out.jump_4pi = static_cast<int>(std::lround(multiple));
  out.jump_residual = std::abs(multiple - out.jump_4pi);
  out.pole_separated = out.jump_4pi != 0;

  const CMatrixd U = propagator_closed_form(rep, base, base.last()).U;
  const CMatrixd U_moved = propagator_closed_form(rep, moved, moved.last()).U;
  out.propagator_change = max_abs(U - U_moved);
  return out;
}

WindingRelation winding_relation_check(const FieldProgram& program, double tau,
                                       const Eigen::Vector3d& e0, const CyclicOptions& options) {
  const MonodromyResult mono = monodromy(program, tau, options.steps, options.monodromy_options());
  if (!mono.identity_flag) {
    throw Error(ErrorCode::not_applicable, "winding relation needs an all-cyclic interval");
  }
  const auto k_of = [&](const Eigen::Vector3d& start) {
    const auto traj = integrate_e(program, start.normalized(), tau, options.steps, options.precess);
    const double raw = traj.alpha(traj.last()) / kTwoPi;
    if (!(std::abs(raw - std::round(raw)) <= options.k_tol)) {
      throw Error(ErrorCode::accuracy, "alpha(tau) / 2 pi = " + std::to_string(raw) +
                                           " is not an integer");
    }
    return static_cast<int>(std::lround(raw));
  };

  const Eigen::Vector3d probes[] = {{1.0, 2.0, 3.0},  {-2.0, 1.0, 1.0}, {1.0, -1.0, 2.0},
                                    {-1.0, -2.0, -1.0}, {2.0, 0.5, -1.5}, {0.3, -1.0, -0.2}};
  WindingRelation out;
  const auto traj = integrate_e(program, e0, tau, options.steps, options.precess);
  const double raw = traj.alpha(traj.last()) / kTwoPi;
  if (!(std::abs(raw - std::round(raw)) <= options.k_tol)) {
    throw Error(ErrorCode::accuracy, "alpha(tau) / 2 pi is not an integer");
  }
  out.k = static_cast<int>(std::lround(raw));
  for (const auto& probe : probes) {
    out.probe_k.push_back(k_of(probe));
    out.probe_k.push_back(k_of(-probe));
  }
  for (int probe_k : out.probe_k) {
    if (probe_k != out.k) {
      throw Error(ErrorCode::not_applicable, "k differs between starting vectors");
    }
  }
  out.K = solid_angle(traj, options.closure_tol).winding;
  out.holds = out.k == -out.K;
  return out;
}

}  // namespace spinevo
