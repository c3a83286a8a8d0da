#pragma once

// Classical precession of a unit vector, de/dt = -omega_B n x e, with the
// bookkeeping the propagator needs: polar angle, unwrapped azimuth, and the
// two parts of the accumulated phase alpha(t).

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "spinevo/field.hpp"

namespace spinevo {

struct PrecessOptions {
  double pole_eps = 1e-7;     // angular distance treated as sitting on a pole
};

/// A passage of e(t) through the south pole within one step: phi flips by
/// about +-pi and alpha_geo by about -+2 pi.
struct PoleEvent {
  double time = 0.0;
  std::size_t node = 0;       // first node after the passage
  int sign = 0;               // sign of the phi jump
  double phi_jump = 0.0;
  double alpha_geo_jump = 0.0;
};

struct PrecessionTrajectory {
  std::vector<double> times;
  std::vector<Eigen::Vector3d> e;
  std::vector<double> theta;
  std::vector<double> phi;          // unwrapped
  std::vector<double> alpha_geo;    // -int (1 - cos theta) dphi
  std::vector<double> alpha_dyn;    // int omega_B e.n dt
  std::vector<PoleEvent> pole_events;
  double drift = 0.0;               // max | |e| - 1 | before renormalization

  std::size_t size() const { return times.size(); }
  std::size_t last() const { return times.size() - 1; }
  double alpha(std::size_t node) const { return alpha_geo[node] + alpha_dyn[node]; }
};

/// Fixed-step RK4 on the sphere with per-step renormalization.
///
/// The phase integrals ride along as extra RK4 components, so they are
/// fourth order like e itself.  The geometric integrand is evaluated in the
/// gauge regular at whichever pole is farther away; a step taken in the
/// south gauge adds back 2 dphi using the unwrapped azimuth of its endpoints.
PrecessionTrajectory integrate_e(const FieldProgram& program, const Eigen::Vector3d& e0,
                                 double t_end, int steps, const PrecessOptions& options = {});

struct SolidAngle {
  double omega = 0.0;  // signed, steradians
  int winding = 0;     // revolutions about +z, anticlockwise positive
};

/// Solid angle int (1 - cos theta) dphi of a closed trace and its winding number.
SolidAngle solid_angle(const PrecessionTrajectory& traj, double closure_tol = 1e-6);

struct MonodromyOptions {
  double sigma_tol = 1e-6;
  double projection_limit = 1e-6;
  PrecessOptions precess;
};

struct MonodromyResult {
  Eigen::Matrix3d E = Eigen::Matrix3d::Identity();
  std::complex<double> sigma{1.0, 0.0};
  Eigen::Vector3d axis_eta = Eigen::Vector3d::UnitZ();
  double rotation_angle = 0.0;   // in [0, pi]
  bool identity_flag = true;
  double projection_delta = 0.0; // distance moved by the orthogonal projection
};

/// Monodromy matrix E(t_end) from the trajectories of the three basis vectors.
MonodromyResult monodromy(const FieldProgram& program, double t_end, int steps,
                          const MonodromyOptions& options = {});

/// Rotation data of an arbitrary proper orthogonal matrix.
MonodromyResult analyze_rotation(const Eigen::Matrix3d& E, double sigma_tol = 1e-6);

/// CSV with header t,ex,ey,ez,theta,phi_unwrapped,alpha_geo,alpha_dyn.
void write_trajectory_csv(std::ostream& out, const PrecessionTrajectory& traj);

}  // namespace spinevo
