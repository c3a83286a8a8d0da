#pragma once

// Reference computations used by the tests.  None of these call into the
// library's own integrators or exponentials.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <numbers>

#include "spinevo/field.hpp"
#include "spinevo/spinalg.hpp"

namespace oracle {

using spinevo::CMatrixd;
using spinevo::CVectord;
using spinevo::SpinRepd;
using Cd = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// exp(i xi s.b) by Pade scaling-and-squaring.
inline CMatrixd expm_spin(const SpinRepd& rep, double xi, const Eigen::Vector3d& b) {
  const CMatrixd A = Cd(0.0, xi) * spinevo::spin_dot(rep, b);
  return A.exp();
}

inline Eigen::Vector3d rodrigues(const Eigen::Vector3d& axis, double angle, const Eigen::Vector3d& v) {
  return v * std::cos(angle) + axis.cross(v) * std::sin(angle) +
         axis * axis.dot(v) * (1.0 - std::cos(angle));
}

/// Spin matrices written out by hand for s = 1/2 and s = 1.
inline CMatrixd pauli_half(int k) {
  CMatrixd m(2, 2);
  switch (k) {
    case 0: m << 0, 0.5, 0.5, 0; break;
    case 1: m << 0, Cd(0, -0.5), Cd(0, 0.5), 0; break;
    default: m << 0.5, 0, 0, -0.5; break;
  }
  return m;
}

inline CMatrixd spin_one(int k) {
  const double r = 1.0 / std::sqrt(2.0);
  CMatrixd m = CMatrixd::Zero(3, 3);
  switch (k) {
    case 0: m << 0, r, 0, r, 0, r, 0, r, 0; break;
    case 1: m << 0, Cd(0, -r), 0, Cd(0, r), 0, Cd(0, -r), 0, Cd(0, r), 0; break;
    default: m << 1, 0, 0, 0, 0, 0, 0, 0, -1; break;
  }
  return m;
}

/// Rotating field n(t) = R_z(rate t) n0 with constant magnitude.  In the frame
/// co-rotating with n the motion is a uniform rotation about
/// W = omega_b0 n0 + rate z.
struct RotatingFrame {
  double cone;
  double rate;
  double omega_b0;

  Eigen::Vector3d n0() const { return {std::sin(cone), 0.0, std::cos(cone)}; }
  Eigen::Vector3d w() const { return omega_b0 * n0() + rate * Eigen::Vector3d::UnitZ(); }

  Eigen::Vector3d e(const Eigen::Vector3d& e0, double t) const {
    const Eigen::Vector3d W = w();
    const Eigen::Vector3d co = rodrigues(W.normalized(), -W.norm() * t, e0);
    return rodrigues(Eigen::Vector3d::UnitZ(), rate * t, co);
  }

  /// U(t) = exp(-i rate t s_z) exp(i t s.W)
  CMatrixd U(const SpinRepd& rep, double t) const {
    const Eigen::Vector3d W = w();
    return expm_spin(rep, -rate * t, Eigen::Vector3d::UnitZ()) *
           expm_spin(rep, W.norm() * t, W.normalized());
  }
};

/// Classical RK4 on dU/dt = i omega_B s.n U, no exponentials involved.
inline CMatrixd rk4_schrodinger(const SpinRepd& rep, const spinevo::FieldProgram& program,
                                double t_end, int steps) {
  const auto generator = [&](double t) {
    const auto f = program.evaluate(std::min(t, program.t_max()));
    return CMatrixd(Cd(0.0, f.omega_b) * spinevo::spin_dot(rep, f.n));
  };
  const double h = t_end / steps;
  CMatrixd U = CMatrixd::Identity(rep.dim, rep.dim);
  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    const CMatrixd g0 = generator(t);
    const CMatrixd gm = generator(t + 0.5 * h);
    const CMatrixd g1 = generator(t + h);
    const CMatrixd k1 = g0 * U;
    const CMatrixd k2 = gm * (U + 0.5 * h * k1);
    const CMatrixd k3 = gm * (U + 0.5 * h * k2);
    const CMatrixd k4 = g1 * (U + h * k3);
    U += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return U;
}

/// Any unit vector orthogonal to v.
inline Eigen::Vector3d orthogonal_to(const Eigen::Vector3d& v) {
  const Eigen::Vector3d probe =
      std::abs(v.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  return v.cross(probe).normalized();
}

}  // namespace oracle
