#include "spinevo/propagate.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "spinevo/error.hpp"

namespace spinevo {

std::string_view to_string(PropagatorSource source) {
  switch (source) {
    case PropagatorSource::closed_form_tilt_first: return "closed_form_tilt_first";
    case PropagatorSource::closed_form_rotation_last: return "closed_form_rotation_last";
    case PropagatorSource::oracle: return "oracle";
  }
  return "oracle";
}

namespace {

void require_node(const PrecessionTrajectory& traj, std::size_t node) {
  if (node >= traj.size()) {
    throw Error(ErrorCode::precondition, "node " + std::to_string(node) + " beyond trajectory of " +
                                             std::to_string(traj.size()) + " nodes");
  }
}

}  // namespace

double alpha_of(const PrecessionTrajectory& traj, std::size_t node) {
  require_node(traj, node);
  return traj.alpha(node);
}

double unitarity_residual(const CMatrixd& U) {
  return max_abs(U * U.adjoint() - CMatrixd::Identity(U.rows(), U.cols()));
}

Propagator propagator_closed_form(const SpinRepd& rep, const PrecessionTrajectory& traj,
                                  std::size_t node, ClosedForm form) {
  require_node(traj, node);
  Propagator p;
  p.t = traj.times[node];
  p.alpha = traj.alpha(node);
  if (node == 0) {
    p.U = CMatrixd::Identity(rep.dim, rep.dim);
    p.source = form == ClosedForm::tilt_first ? PropagatorSource::closed_form_tilt_first
                                              : PropagatorSource::closed_form_rotation_last;
    return p;
  }
  const CMatrixd untilt_now = exp_i_spin(rep, -traj.theta[node], tilt_axis(traj.phi[node]));
  const CMatrixd tilt_start = exp_i_spin(rep, traj.theta[0], tilt_axis(traj.phi[0]));
  if (form == ClosedForm::tilt_first) {
    p.U = untilt_now * exp_i_spin(rep, p.alpha, Eigen::Vector3d::UnitZ()) * tilt_start;
    p.source = PropagatorSource::closed_form_tilt_first;
  } else {
    p.U = untilt_now * tilt_start * exp_i_spin(rep, p.alpha, traj.e[0].normalized());
    p.source = PropagatorSource::closed_form_rotation_last;
  }
  return p;
}

Propagator oracle_propagator(const SpinRepd& rep, const FieldProgram& program, double t_end,
                             int steps) {
  if (steps < 64) throw Error(ErrorCode::precondition, "oracle needs at least 64 steps");
  if (!(t_end >= 0.0) || t_end > program.t_max()) {
    throw Error(ErrorCode::domain, "oracle end time outside field domain");
  }
  Propagator p;
  p.t = t_end;
  p.source = PropagatorSource::oracle;
  p.U = CMatrixd::Identity(rep.dim, rep.dim);
  const double h = t_end / steps;
  for (int i = 0; i < steps; ++i) {
    const FieldSample f = program.evaluate((i + 0.5) * h);
    if (f.omega_b == 0.0) continue;
    p.U = exp_i_spin(rep, h * f.omega_b, f.n) * p.U;
  }
  return p;
}

double schrodinger_residual(const SpinRepd& rep, const FieldProgram& program,
                            std::span<const Propagator> samples) {
  if (samples.size() < 3) {
    throw Error(ErrorCode::precondition, "Schrodinger residual needs at least 3 samples");
  }
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < samples.size(); ++k) {
    const double h = 0.5 * (samples[k + 1].t - samples[k - 1].t);
    const FieldSample f = program.evaluate(samples[k].t);
    const CMatrixd derivative = (samples[k + 1].U - samples[k - 1].U) / (2.0 * h);
    const CMatrixd generator = std::complex<double>(0.0, f.omega_b) * spin_dot(rep, f.n);
    worst = std::max(worst, max_abs(derivative - generator * samples[k].U));
  }
  return worst;
}

double transported_eigenstate_residual(const SpinRepd& rep, const PrecessionTrajectory& traj,
                                       std::size_t node, HalfInt m) {
  require_node(traj, node);
  const CVectord psi0 = eigenstate_of_spin_dot(rep, traj.e[0], m);
  const CVectord psi = propagator_closed_form(rep, traj, node).U * psi0;
  return (spin_dot(rep, traj.e[node]) * psi - m.value() * psi).norm();
}

}  // namespace spinevo
