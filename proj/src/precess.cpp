#include "spinevo/precess.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <string>

#include "spinevo/error.hpp"

namespace spinevo {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Rates {
  Eigen::Vector3d de;
  double dyn = 0.0;  // omega_B e.n
  double geo = 0.0;  // (1 - cos theta) dphi/dt (north) or -(1 + cos theta) dphi/dt (south)
};

Rates rates(const FieldProgram& program, double t, const Eigen::Vector3d& e, bool north) {
  const FieldSample f = program.evaluate(t);
  Rates r;
  r.de = -f.omega_b * f.n.cross(e);
  const double len = e.norm();
  r.dyn = f.omega_b * e.dot(f.n) / len;
  // e_x de_y - e_y de_x = rho^2 dphi/dt, and (1 -+ cos theta) / sin^2 theta = 1 / (1 +- cos theta).
  const double swirl = e.x() * r.de.y() - e.y() * r.de.x();
  r.geo = north ? swirl / (len * (len + e.z())) : -swirl / (len * (len - e.z()));
  return r;
}

// Nearest-branch increment in (-pi, pi].
double branch_increment(double raw, double previous) {
  double d = std::remainder(raw - previous, kTwoPi);
  if (d <= -kPi) d += kTwoPi;
  return d;
}

// Distance from the z axis to the chord between two points, and where along
// the chord it is attained.
std::pair<double, double> chord_distance_to_axis(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const Eigen::Vector2d p = a.head<2>();
  const Eigen::Vector2d q = b.head<2>() - p;
  const double len2 = q.squaredNorm();
  const double s = len2 > 0.0 ? std::clamp(-p.dot(q) / len2, 0.0, 1.0) : 0.0;
  return {(p + s * q).norm(), s};
}

void require_unit_start(const Eigen::Vector3d& e0) {
  if (!(std::abs(e0.norm() - 1.0) <= 1e-9)) {
    throw Error(ErrorCode::precondition,
                "initial vector must be unit (norm " + std::to_string(e0.norm()) + ")");
  }
}

}  // namespace

PrecessionTrajectory integrate_e(const FieldProgram& program, const Eigen::Vector3d& e0,
                                 double t_end, int steps, const PrecessOptions& options) {
  require_unit_start(e0);
  if (steps < 8) throw Error(ErrorCode::precondition, "integrate_e needs at least 8 steps");
  if (!(t_end > 0.0) || t_end > program.t_max()) {
    throw Error(ErrorCode::domain, "t_end = " + std::to_string(t_end) +
                                       " outside field domain (0, " +
                                       std::to_string(program.t_max()) + "]");
  }

  const auto n_nodes = static_cast<std::size_t>(steps) + 1;
  PrecessionTrajectory traj;
  traj.times.reserve(n_nodes);
  traj.e.reserve(n_nodes);
  traj.theta.reserve(n_nodes);
  traj.phi.reserve(n_nodes);
  traj.alpha_geo.reserve(n_nodes);
  traj.alpha_dyn.reserve(n_nodes);

  const double h = t_end / steps;
  Eigen::Vector3d e = e0;
  double rho = std::hypot(e.x(), e.y());
  double phi = rho < options.pole_eps ? 0.0 : std::atan2(e.y(), e.x());
  double alpha_geo = 0.0;
  double alpha_dyn = 0.0;

  traj.times.push_back(0.0);
  traj.e.push_back(e);
  traj.theta.push_back(std::atan2(rho, e.z()));
  traj.phi.push_back(phi);
  traj.alpha_geo.push_back(0.0);
  traj.alpha_dyn.push_back(0.0);

  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    const double t_next = i + 1 == steps ? t_end : (i + 1) * h;
    const double dt = t_next - t;
    const bool north = e.z() >= 0.0;

    const Rates k1 = rates(program, t, e, north);
    const Rates k2 = rates(program, t + 0.5 * dt, e + 0.5 * dt * k1.de, north);
    const Rates k3 = rates(program, t + 0.5 * dt, e + 0.5 * dt * k2.de, north);
    const Rates k4 = rates(program, t_next, e + dt * k3.de, north);

    Eigen::Vector3d next = e + (dt / 6.0) * (k1.de + 2.0 * k2.de + 2.0 * k3.de + k4.de);
    alpha_dyn += (dt / 6.0) * (k1.dyn + 2.0 * k2.dyn + 2.0 * k3.dyn + k4.dyn);
    const double geo = (dt / 6.0) * (k1.geo + 2.0 * k2.geo + 2.0 * k3.geo + k4.geo);

    const double len = next.norm();
    traj.drift = std::max(traj.drift, std::abs(len - 1.0));
    next /= len;

    rho = std::hypot(next.x(), next.y());
    double dphi = 0.0;
    if (rho >= options.pole_eps) dphi = branch_increment(std::atan2(next.y(), next.x()), phi);
    phi += dphi;

    const double geo_step = north ? -geo : -(geo + 2.0 * dphi);
    alpha_geo += geo_step;

    if (!north && std::abs(dphi) > 0.5 * kPi) {
      const auto [distance, where] = chord_distance_to_axis(e, next);
      if (distance < options.pole_eps) {
        traj.pole_events.push_back(
            {t + where * dt, traj.times.size(), dphi > 0.0 ? 1 : -1, dphi, geo_step});
      }
    }

    e = next;
    traj.times.push_back(t_next);
    traj.e.push_back(e);
    traj.theta.push_back(std::atan2(rho, e.z()));
    traj.phi.push_back(phi);
    traj.alpha_geo.push_back(alpha_geo);
    traj.alpha_dyn.push_back(alpha_dyn);
  }
  return traj;
}

SolidAngle solid_angle(const PrecessionTrajectory& traj, double closure_tol) {
  if (traj.size() < 2) throw Error(ErrorCode::precondition, "trajectory has no steps");
  const double closure = (traj.e.back() - traj.e.front()).norm();
  if (!(closure < closure_tol)) {
    throw Error(ErrorCode::precondition,
                "trajectory is not closed: closure residual " + std::to_string(closure));
  }
  SolidAngle out;
  out.omega = -traj.alpha_geo.back();
  out.winding = static_cast<int>(std::lround((traj.phi.back() - traj.phi.front()) / kTwoPi));
  return out;
}

MonodromyResult analyze_rotation(const Eigen::Matrix3d& E, double sigma_tol) {
  MonodromyResult r;
  r.E = E;
  const Eigen::Matrix3d skew = E - E.transpose();
  const Eigen::Vector3d vee(skew(2, 1), skew(0, 2), skew(1, 0));
  const double cos_angle = 0.5 * (E.trace() - 1.0);
  r.rotation_angle = std::atan2(0.5 * vee.norm(), cos_angle);
  r.identity_flag = 2.0 * std::sin(0.5 * r.rotation_angle) < sigma_tol;

  if (r.identity_flag) {
    r.axis_eta = Eigen::Vector3d::UnitZ();
    r.sigma = {1.0, 0.0};
    return r;
  }

  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(E - Eigen::Matrix3d::Identity(), Eigen::ComputeFullV);
  Eigen::Vector3d axis = svd.matrixV().col(2).normalized();
  int lead = 0;
  for (int k = 1; k < 3; ++k) {
    if (std::abs(axis(k)) > std::abs(axis(lead)) + 1e-12) lead = k;
  }
  if (axis(lead) < 0.0) axis = -axis;
  r.axis_eta = axis;

  const double sin_angle = 0.5 * axis.dot(vee);
  r.sigma = std::complex<double>(cos_angle, sin_angle) / std::hypot(cos_angle, sin_angle);
  return r;
}

MonodromyResult monodromy(const FieldProgram& program, double t_end, int steps,
                          const MonodromyOptions& options) {
  Eigen::Matrix3d raw;
  for (int k = 0; k < 3; ++k) {
    const auto traj = integrate_e(program, Eigen::Vector3d::Unit(k), t_end, steps, options.precess);
    raw.col(k) = traj.e.back();
  }
  const Eigen::JacobiSVD<Eigen::Matrix3d> svd(raw, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d E = svd.matrixU() * svd.matrixV().transpose();
  const double delta = (raw - E).cwiseAbs().maxCoeff();
  if (delta > options.projection_limit || E.determinant() < 0.0) {
    throw Error(ErrorCode::accuracy, "monodromy matrix is off the rotation group by " +
                                         std::to_string(delta) + "; raise the step count");
  }
  MonodromyResult r = analyze_rotation(E, options.sigma_tol);
  r.projection_delta = delta;
  return r;
}

void write_trajectory_csv(std::ostream& out, const PrecessionTrajectory& traj) {
  const auto old_precision = out.precision(17);
  out << "t,ex,ey,ez,theta,phi_unwrapped,alpha_geo,alpha_dyn\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out << traj.times[i] << ',' << traj.e[i].x() << ',' << traj.e[i].y() << ',' << traj.e[i].z()
        << ',' << traj.theta[i] << ',' << traj.phi[i] << ',' << traj.alpha_geo[i] << ','
        << traj.alpha_dyn[i] << '\n';
  }
  out.precision(old_precision);
}

}  // namespace spinevo
