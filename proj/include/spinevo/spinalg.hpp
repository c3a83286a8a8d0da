#pragma once

// Finite-dimensional spin algebra: generator matrices in the descending-m
// basis, s.b contractions, rotation exponentials exp(i xi s.b) and the
// phase-fixed eigenstates of s.b.  Header-only, templated on the real scalar.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <compare>
#include <numbers>
#include <string>
#include <type_traits>

#include "spinevo/error.hpp"

namespace spinevo {

template <typename Scalar>
using CMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using CVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

using CMatrixd = CMatrix<double>;
using CVectord = CVector<double>;

inline constexpr int kMaxTwiceS = 40;

/// A half-integer stored as twice its value (s = 3/2 is {3}).
struct HalfInt {
  int twice = 0;

  constexpr double value() const { return 0.5 * twice; }
  constexpr bool is_integer() const { return twice % 2 == 0; }
  friend constexpr auto operator<=>(HalfInt, HalfInt) = default;
};

template <typename Scalar = double>
struct SpinRep {
  static_assert(std::is_floating_point_v<Scalar>);

  int twice_s = 0;
  int dim = 0;
  CMatrix<Scalar> sx, sy, sz;

  HalfInt s() const { return {twice_s}; }

  const CMatrix<Scalar>& generator(int k) const {
    return k == 0 ? sx : (k == 1 ? sy : sz);
  }

  /// Basis index of the sz eigenvalue m (index 0 holds m = s).
  int index_of(HalfInt m) const { return (twice_s - m.twice) / 2; }
  HalfInt level(int index) const { return {twice_s - 2 * index}; }

  bool in_ladder(HalfInt m) const {
    return m.twice >= -twice_s && m.twice <= twice_s && (twice_s - m.twice) % 2 == 0;
  }
};

using SpinRepd = SpinRep<double>;

/// Ladder-operator construction of sx, sy, sz for spin twice_s/2.
template <typename Scalar = double>
SpinRep<Scalar> build_spin_rep(int twice_s) {
  if (twice_s < 1 || twice_s > kMaxTwiceS) {
    throw Error(ErrorCode::precondition,
                "twice_s must lie in [1, " + std::to_string(kMaxTwiceS) + "], got " +
                    std::to_string(twice_s));
  }
  using C = std::complex<Scalar>;
  SpinRep<Scalar> rep;
  rep.twice_s = twice_s;
  rep.dim = twice_s + 1;
  const int n = rep.dim;
  const Scalar s = Scalar(twice_s) / 2;

  CMatrix<Scalar> raise = CMatrix<Scalar>::Zero(n, n);
  rep.sz = CMatrix<Scalar>::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const Scalar m = s - Scalar(i);
    rep.sz(i, i) = C(m, 0);
    // s+ |m> = sqrt(s(s+1) - m(m+1)) |m+1>, and m+1 sits at index i-1.
    if (i > 0) raise(i - 1, i) = C(std::sqrt(s * (s + 1) - m * (m + 1)), 0);
  }
  const CMatrix<Scalar> lower = raise.adjoint();
  rep.sx = (raise + lower) * C(Scalar(0.5), 0);
  rep.sy = (raise - lower) * C(0, Scalar(-0.5));
  return rep;
}

/// b.s = b_x sx + b_y sy + b_z sz.
template <typename Scalar, typename Derived>
CMatrix<Scalar> spin_dot(const SpinRep<Scalar>& rep, const Eigen::MatrixBase<Derived>& b) {
  using C = std::complex<Scalar>;
  return rep.sx * C(Scalar(b(0)), 0) + rep.sy * C(Scalar(b(1)), 0) +
         rep.sz * C(Scalar(b(2)), 0);
}

namespace detail {

template <typename Derived>
void require_unit(const Eigen::MatrixBase<Derived>& b, const char* what) {
  using std::abs;
  const double norm = static_cast<double>(b.norm());
  if (!(abs(norm - 1.0) <= 1e-9)) {
    throw Error(ErrorCode::precondition,
                std::string(what) + " must be a unit vector (norm " + std::to_string(norm) + ")");
  }
}

}  // namespace detail

/// exp(i xi s.b) for unit b, by spectral decomposition of s.b.
///
/// The eigenvalues of s.b are exactly -s, ..., s; the solver's values are
/// checked against that ladder and replaced by the exact levels before
/// exponentiating, so the result is unitary to rounding.
template <typename Scalar, typename Derived>
CMatrix<Scalar> exp_i_spin(const SpinRep<Scalar>& rep, Scalar xi,
                           const Eigen::MatrixBase<Derived>& b) {
  detail::require_unit(b, "rotation axis");
  using C = std::complex<Scalar>;
  const Eigen::SelfAdjointEigenSolver<CMatrix<Scalar>> solver(spin_dot(rep, b));
  const auto& values = solver.eigenvalues();  // ascending: -s first
  CVector<Scalar> phases(rep.dim);
  for (int i = 0; i < rep.dim; ++i) {
    const Scalar level = Scalar(i) - Scalar(rep.twice_s) / 2;
    using std::abs;
    if (!(abs(values(i) - level) <= Scalar(1e-9))) {
      throw Error(ErrorCode::accuracy, "s.b spectrum deviates from the m ladder");
    }
    phases(i) = std::exp(C(0, xi * level));
  }
  const auto& vectors = solver.eigenvectors();
  return vectors * phases.asDiagonal() * vectors.adjoint();
}

/// Polar and azimuthal angles of a unit vector; phi = 0 on the z axis.
template <typename Scalar>
struct SphericalAngles {
  Scalar theta = 0;
  Scalar phi = 0;
};

template <typename Derived>
auto spherical_angles(const Eigen::MatrixBase<Derived>& b) {
  using Scalar = typename Derived::Scalar;
  using std::atan2;
  using std::hypot;
  const Scalar rho = hypot(b(0), b(1));
  SphericalAngles<Scalar> out;
  out.theta = atan2(rho, b(2));
  out.phi = rho == Scalar(0) ? Scalar(0) : atan2(b(1), b(0));
  return out;
}

/// Horizontal axis d = (-sin phi, cos phi, 0) about which e_z is tilted onto e.
template <typename Scalar>
Vec3<Scalar> tilt_axis(Scalar phi) {
  using std::cos;
  using std::sin;
  return Vec3<Scalar>(-sin(phi), cos(phi), Scalar(0));
}

template <typename Scalar>
Vec3<Scalar> unit_from_angles(Scalar theta, Scalar phi) {
  using std::cos;
  using std::sin;
  return Vec3<Scalar>(sin(theta) * cos(phi), sin(theta) * sin(phi), cos(theta));
}

template <typename Scalar>
CVector<Scalar> basis_state(const SpinRep<Scalar>& rep, HalfInt m) {
  if (!rep.in_ladder(m)) {
    throw Error(ErrorCode::precondition,
                "m = " + std::to_string(m.value()) + " is not in the spin ladder");
  }
  CVector<Scalar> chi = CVector<Scalar>::Zero(rep.dim);
  chi(rep.index_of(m)) = 1;
  return chi;
}

/// Eigenstate of s.b with eigenvalue m, built as exp(-i theta s.d) chi0_m so
/// that its phase is fixed by the direction of b (phi = 0 for b = -z).
template <typename Scalar, typename Derived>
CVector<Scalar> eigenstate_of_spin_dot(const SpinRep<Scalar>& rep,
                                       const Eigen::MatrixBase<Derived>& b, HalfInt m) {
  detail::require_unit(b, "quantization axis");
  const Vec3<Scalar> axis = b.template cast<Scalar>();
  const auto angles = spherical_angles(axis);
  return exp_i_spin(rep, -angles.theta, tilt_axis(angles.phi)) * basis_state(rep, m);
}

/// Spin vector v = <psi|s|psi>.
template <typename Scalar>
Vec3<Scalar> spin_expectation(const SpinRep<Scalar>& rep, const CVector<Scalar>& psi) {
  Vec3<Scalar> v;
  for (int k = 0; k < 3; ++k) v(k) = psi.dot(rep.generator(k) * psi).real();
  return v;
}

template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : static_cast<double>(m.cwiseAbs().maxCoeff());
}

}  // namespace spinevo
