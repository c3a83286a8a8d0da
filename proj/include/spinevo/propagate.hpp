#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "spinevo/field.hpp"
#include "spinevo/precess.hpp"
#include "spinevo/spinalg.hpp"

namespace spinevo {

enum class PropagatorSource { closed_form_tilt_first, closed_form_rotation_last, oracle };

std::string_view to_string(PropagatorSource source);

/// Which factor ordering of the closed-form propagator to assemble.
///   tilt_first:     exp(-i th(t) s.d(t)) exp(i a s_z)    exp(i th(0) s.d(0))
///   rotation_last:  exp(-i th(t) s.d(t)) exp(i th(0) s.d(0)) exp(i a s.e0)
enum class ClosedForm { tilt_first, rotation_last };

struct Propagator {
  CMatrixd U;
  double t = 0.0;
  double alpha = 0.0;
  PropagatorSource source = PropagatorSource::oracle;
};

/// alpha(t) at a trajectory node: geometric plus dynamic part.
double alpha_of(const PrecessionTrajectory& traj, std::size_t node);

/// Exact evolution operator U(t_node) assembled from a single precession
/// trajectory; no time ordering is involved.
Propagator propagator_closed_form(const SpinRepd& rep, const PrecessionTrajectory& traj,
                                  std::size_t node, ClosedForm form = ClosedForm::tilt_first);

/// Brute-force time-ordered product of midpoint exponentials
/// exp(i dt omega_B(t_mid) s.n(t_mid)), latest factor on the left.
Propagator oracle_propagator(const SpinRepd& rep, const FieldProgram& program, double t_end,
                             int steps);

/// Max over interior samples of |(U_{k+1} - U_{k-1}) / 2h - i omega_B s.n U_k|.
/// Samples must be at equally spaced consecutive times.
double schrodinger_residual(const SpinRepd& rep, const FieldProgram& program,
                            std::span<const Propagator> samples);

/// |(s.e(t)) psi(t) - m psi(t)| for psi(0) the m-eigenstate of s.e0.
double transported_eigenstate_residual(const SpinRepd& rep, const PrecessionTrajectory& traj,
                                       std::size_t node, HalfInt m);

double unitarity_residual(const CMatrixd& U);

}  // namespace spinevo
