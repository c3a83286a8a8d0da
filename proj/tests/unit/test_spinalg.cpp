#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "spinevo/error.hpp"
#include "spinevo/spinalg.hpp"

using namespace spinevo;
using oracle::Cd;

namespace {

double commutator_residual(const SpinRepd& rep) {
  double worst = 0.0;
  for (int k = 0; k < 3; ++k) {
    const auto& a = rep.generator(k);
    const auto& b = rep.generator((k + 1) % 3);
    const auto& c = rep.generator((k + 2) % 3);
    worst = std::max(worst, max_abs(a * b - b * a - Cd(0, 1) * c));
  }
  return worst;
}

}  // namespace

TEST_CASE("spin-1/2 generators are half the Pauli matrices") {
  const auto rep = build_spin_rep<double>(1);
  CHECK(rep.dim == 2);
  for (int k = 0; k < 3; ++k) CHECK(max_abs(rep.generator(k) - oracle::pauli_half(k)) < 1e-15);
}

TEST_CASE("spin-1 generators match the hand-written matrices") {
  const auto rep = build_spin_rep<double>(2);
  for (int k = 0; k < 3; ++k) CHECK(max_abs(rep.generator(k) - oracle::spin_one(k)) < 1e-15);
  CHECK(max_abs(rep.sz - CMatrixd(Eigen::Vector3cd(1, 0, -1).asDiagonal())) == 0.0);
}

TEST_CASE("ladder invariants for a range of spins") {
  for (int twice_s : {1, 2, 3, 4, 8, 17, 40}) {
    CAPTURE(twice_s);
    const auto rep = build_spin_rep<double>(twice_s);
    const double s = 0.5 * twice_s;
    CHECK(rep.dim == twice_s + 1);
    CHECK(commutator_residual(rep) < 1e-12 * std::max(1.0, s));
    const CMatrixd casimir = rep.sx * rep.sx + rep.sy * rep.sy + rep.sz * rep.sz;
    CHECK(max_abs(casimir - s * (s + 1) * CMatrixd::Identity(rep.dim, rep.dim)) < 1e-11 * s * s);
    for (int k = 0; k < 3; ++k) CHECK(max_abs(rep.generator(k) - rep.generator(k).adjoint()) == 0.0);
    for (int i = 0; i < rep.dim; ++i) CHECK(rep.sz(i, i).real() == doctest::Approx(s - i));
  }
}

TEST_CASE("half-integer bookkeeping") {
  const auto rep = build_spin_rep<double>(3);
  CHECK(rep.s().value() == 1.5);
  CHECK_FALSE(rep.s().is_integer());
  CHECK(rep.level(0) == HalfInt{3});
  CHECK(rep.level(3) == HalfInt{-3});
  CHECK(rep.index_of(HalfInt{-1}) == 2);
  CHECK(rep.in_ladder(HalfInt{1}));
  CHECK_FALSE(rep.in_ladder(HalfInt{2}));
  CHECK_FALSE(rep.in_ladder(HalfInt{5}));
}

TEST_CASE("spin outside 1..40 is rejected") {
  for (int bad : {0, -1, 41}) {
    try {
      build_spin_rep<double>(bad);
      FAIL("accepted twice_s = " << bad);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::precondition);
    }
  }
}

TEST_CASE("spin_dot contractions") {
  const auto rep = build_spin_rep<double>(1);
  CHECK(max_abs(spin_dot(rep, Eigen::Vector3d(0, 0, 1)) - rep.sz) == 0.0);
  CHECK(max_abs(spin_dot(rep, Eigen::Vector3d::Zero())) == 0.0);
  CMatrixd half_x(2, 2);
  half_x << 0, 0.5, 0.5, 0;
  CHECK(max_abs(spin_dot(rep, Eigen::Vector3d(1, 0, 0)) - half_x) == 0.0);
  const auto rep3 = build_spin_rep<double>(3);
  const Eigen::Vector3d b(0.3, -1.2, 2.0);
  const CMatrixd sb = spin_dot(rep3, b);
  CHECK(max_abs(sb - sb.adjoint()) == 0.0);
}

TEST_CASE("exp_i_spin closed cases") {
  const auto rep = build_spin_rep<double>(1);
  const Eigen::Vector3d z(0, 0, 1);
  CHECK(max_abs(exp_i_spin(rep, 0.0, Eigen::Vector3d(0.6, 0.0, 0.8)) - CMatrixd::Identity(2, 2)) <
        1e-15);
  CMatrixd expected = CMatrixd::Zero(2, 2);
  expected(0, 0) = Cd(0, 1);
  expected(1, 1) = Cd(0, -1);
  CHECK(max_abs(exp_i_spin(rep, oracle::kPi, z) - expected) < 1e-15);
}

TEST_CASE("exp_i_spin agrees with a Pade matrix exponential") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> angle(-10.0, 10.0);
  for (int twice_s : {1, 2, 3, 4, 8}) {
    const auto rep = build_spin_rep<double>(twice_s);
    for (int draw = 0; draw < 10; ++draw) {
      const Eigen::Vector3d b = Eigen::Vector3d(normal(rng), normal(rng), normal(rng)).normalized();
      const double xi = angle(rng);
      const CMatrixd M = exp_i_spin(rep, xi, b);
      CHECK(max_abs(M - oracle::expm_spin(rep, xi, b)) < 1e-11);
      CHECK(max_abs(M * M.adjoint() - CMatrixd::Identity(rep.dim, rep.dim)) < 1e-12);
      CHECK(std::abs(std::abs(M.determinant()) - 1.0) < 1e-10);
      CHECK(max_abs(exp_i_spin(rep, xi + 4 * oracle::kPi, b) - M) < 1e-10);
      if (twice_s % 2 == 0) CHECK(max_abs(exp_i_spin(rep, xi + 2 * oracle::kPi, b) - M) < 1e-10);
    }
  }
  const auto rep = build_spin_rep<double>(2);
  const CMatrixd M = exp_i_spin(rep, oracle::kPi / 2, Eigen::Vector3d(1, 0, 0));
  const Eigen::SelfAdjointEigenSolver<CMatrixd> eig(rep.sx);
  const CMatrixd reference = eig.eigenvectors() *
                             (Cd(0, oracle::kPi / 2) * eig.eigenvalues().cast<Cd>()).array().exp().matrix().asDiagonal() *
                             eig.eigenvectors().adjoint();
  CHECK(max_abs(M - reference) < 1e-12);
}

TEST_CASE("exp_i_spin requires a unit axis") {
  const auto rep = build_spin_rep<double>(2);
  try {
    exp_i_spin(rep, 1.0, Eigen::Vector3d(0, 0, 1.001));
    FAIL("non-unit axis accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::precondition);
  }
}

TEST_CASE("rotation conjugation identity") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> angle(0.0, 2 * oracle::kPi);
  for (int twice_s : {1, 2, 3, 4}) {
    const auto rep = build_spin_rep<double>(twice_s);
    for (int draw = 0; draw < 25; ++draw) {
      const Eigen::Vector3d b = Eigen::Vector3d(normal(rng), normal(rng), normal(rng)).normalized();
      const double xi = angle(rng);
      const CMatrixd R = exp_i_spin(rep, xi, b);
      const CMatrixd sb = spin_dot(rep, b);
      for (int k = 0; k < 3; ++k) {
        const Eigen::Vector3d ek = Eigen::Vector3d::Unit(k);
        // k-th component of s cos xi + (b x s) sin xi + b (b.s)(1 - cos xi)
        const CMatrixd rhs = rep.generator(k) * std::cos(xi) +
                             spin_dot(rep, ek.cross(b)) * std::sin(xi) +
                             sb * (b(k) * (1 - std::cos(xi)));
        CHECK(max_abs(R * rep.generator(k) * R.adjoint() - rhs) < 1e-10);
      }
    }
  }
}

TEST_CASE("tilting sz onto an arbitrary direction") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> polar(0.01, oracle::kPi - 0.01);
  std::uniform_real_distribution<double> azimuth(0.0, 2 * oracle::kPi);
  const auto rep = build_spin_rep<double>(3);
  for (int draw = 0; draw < 20; ++draw) {
    const double theta = polar(rng);
    const double phi = azimuth(rng);
    const CMatrixd tilt = exp_i_spin(rep, -theta, tilt_axis(phi));
    CHECK(max_abs(spin_dot(rep, unit_from_angles(theta, phi)) - tilt * rep.sz * tilt.adjoint()) <
          1e-10);
  }
}

TEST_CASE("spherical angles") {
  const auto a = spherical_angles(Eigen::Vector3d(0, 0, -1));
  CHECK(a.theta == doctest::Approx(oracle::kPi));
  CHECK(a.phi == 0.0);
  const auto b = spherical_angles(Eigen::Vector3d(0, 1, 0));
  CHECK(b.theta == doctest::Approx(oracle::kPi / 2));
  CHECK(b.phi == doctest::Approx(oracle::kPi / 2));
}

TEST_CASE("phase-fixed eigenstates") {
  const auto rep1 = build_spin_rep<double>(1);
  const CVectord up = eigenstate_of_spin_dot(rep1, Eigen::Vector3d(0, 0, 1), HalfInt{1});
  CHECK(max_abs(up - CVectord(Eigen::Vector2cd(1, 0))) < 1e-15);
  const CVectord plus_x = eigenstate_of_spin_dot(rep1, Eigen::Vector3d(1, 0, 0), HalfInt{1});
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(max_abs(plus_x - CVectord(Eigen::Vector2cd(r, r))) < 1e-15);

  const auto rep4 = build_spin_rep<double>(4);
  const Eigen::Vector3d b(0.6, 0.0, 0.8);
  const CVectord chi = eigenstate_of_spin_dot(rep4, b, HalfInt{2});
  const CMatrixd sb = spin_dot(rep4, b);
  CHECK((sb * chi - chi).norm() < 1e-10);
  const Eigen::SelfAdjointEigenSolver<CMatrixd> eig(sb);
  const CVectord reference = eig.eigenvectors().col(3);  // eigenvalues ascend: -2,-1,0,1,2
  CHECK(std::abs(std::abs(reference.dot(chi)) - 1.0) < 1e-12);

  // b = -z: phi is taken as 0 and the result is still an eigenvector.
  const CVectord down = eigenstate_of_spin_dot(rep4, Eigen::Vector3d(0, 0, -1), HalfInt{-2});
  CHECK((spin_dot(rep4, Eigen::Vector3d(0, 0, -1)) * down + down).norm() < 1e-12);

  CHECK_THROWS_AS(eigenstate_of_spin_dot(rep4, b, HalfInt{5}), Error);
  CHECK_THROWS_AS(eigenstate_of_spin_dot(rep4, b, HalfInt{1}), Error);
}

TEST_CASE("spin expectation of eigenstates") {
  const auto rep = build_spin_rep<double>(3);
  const Eigen::Vector3d b = Eigen::Vector3d(1, -2, 0.5).normalized();
  for (int i = 0; i < rep.dim; ++i) {
    const HalfInt m = rep.level(i);
    const auto v = spin_expectation(rep, eigenstate_of_spin_dot(rep, b, m));
    CHECK((v - m.value() * b).norm() < 1e-12);
  }
}

TEST_CASE("templated on the scalar type") {
  const auto rep = build_spin_rep<long double>(2);
  const auto M = exp_i_spin(rep, 0.5L, Vec3<long double>(0, 0, 1));
  CHECK(std::abs(M(0, 0) - std::polar(1.0L, 0.5L)) < 1e-18L);
}
