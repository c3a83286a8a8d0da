#pragma once

// Cyclic solutions over [0, tau] and the split of their total phase into
// dynamic and geometric parts.

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <string_view>
#include <vector>

#include "spinevo/field.hpp"
#include "spinevo/precess.hpp"
#include "spinevo/spinalg.hpp"

namespace spinevo {

/// Reduce an angle to the canonical interval (-pi, pi].
double wrap_phase(double angle);

/// |a - b| measured modulo 2 pi.
double phase_distance(double a, double b);

enum class CyclicKind { eigen_family, rational_superposition, all_cyclic };

std::string_view to_string(CyclicKind kind);

struct CyclicReport {
  CyclicKind kind = CyclicKind::eigen_family;
  double m_or_v0 = 0.0;
  double delta = 0.0;                 // analytic total phase, wrapped
  double beta = 0.0;                  // dynamic phase, not reduced
  double gamma = 0.0;                 // geometric phase, wrapped
  std::optional<double> omega_e;
  std::optional<double> omega_v;
  std::optional<int> K;
  std::optional<int> k;
  double cyclicity_residual = 0.0;    // |U(tau) psi0 - exp(i delta) psi0|
  double delta_spectroscopic = 0.0;   // arg <psi0|U(tau)|psi0>

  // Cross-check data; not part of the per-report schema.
  double gamma_check = 0.0;           // geometric phase by the second route
  double beta_direct = 0.0;           // spin-vector length times int omega_B e.n dt
  double alpha_tau = 0.0;
  double k_raw = 0.0;                 // alpha(tau) / 2 pi before snapping (all_cyclic)
  Eigen::Vector3d e0 = Eigen::Vector3d::UnitZ();
  CVectord initial_state;
};

struct CyclicOptions {
  int steps = 4096;
  double sigma_tol = 1e-6;
  double k_tol = 1e-4;
  double rational_tol = 1e-6;
  double closure_tol = 1e-6;
  double scalar_tol = 1e-6;
  double v_zero_tol = 1e-9;
  PrecessOptions precess;

  MonodromyOptions monodromy_options() const;
};

/// The 2s+1 eigenstates of s.eta, eta the rotation axis of E(tau).
std::vector<CyclicReport> guaranteed_cyclic_family(const SpinRepd& rep, const FieldProgram& program,
                                                   double tau, const CyclicOptions& options = {});

struct RationalSuperposition {
  HalfInt m;                                    // reference level
  std::vector<std::complex<double>> coeffs;     // c_j for j = j_min, j_min + 1, ...
  int j_min = 0;
  int n = 1;                                    // alpha(tau) = p pi / n
  int p = 1;
};

/// Superposition of levels m + 2 n j along eta when alpha(tau) = p pi / n.
CyclicReport rational_superposition_family(const SpinRepd& rep, const FieldProgram& program,
                                           double tau, const RationalSuperposition& sup,
                                           const CyclicOptions& options = {});

struct ScalarCheck {
  double offdiagonal = 0.0;     // max |U_ij|, i != j
  double phase_spread = 0.0;    // max pairwise distance of diagonal phases
  std::complex<double> phase{1.0, 0.0};
};

ScalarCheck check_scalar_propagator(const SpinRepd& rep, const FieldProgram& program, double tau,
                                    const CyclicOptions& options = {});

/// Reports for arbitrary initial states (sz-basis amplitudes) on an interval
/// whose monodromy is the identity.
std::vector<CyclicReport> all_cyclic_analysis(const SpinRepd& rep, const FieldProgram& program,
                                              double tau,
                                              const std::vector<CVectord>& initial_states,
                                              const CyclicOptions& options = {});

struct AlphaSensitivity {
  double alpha = 0.0;
  double alpha_perturbed = 0.0;
  double delta_alpha = 0.0;
  double delta_alpha_half = 0.0;    // same perturbation at half scale
  int k = 0;
  int k_perturbed = 0;
  bool pole_separated = false;      // traces pass the south pole on opposite sides
  int jump_4pi = 0;                 // delta_alpha / 4 pi, rounded
  double jump_residual = 0.0;       // |delta_alpha / 4 pi - jump_4pi|
  double propagator_change = 0.0;   // max |U(tau) - U'(tau)|
};

/// Change of alpha(tau) under e0 -> normalize(e0 + delta_e0), delta_e0 . e0 = 0.
AlphaSensitivity alpha_sensitivity(const SpinRepd& rep, const FieldProgram& program, double tau,
                                   const Eigen::Vector3d& e0, const Eigen::Vector3d& delta_e0,
                                   const CyclicOptions& options = {});

struct WindingRelation {
  int k = 0;
  int K = 0;
  bool holds = false;
  std::vector<int> probe_k;
};

/// k = -K, valid only where k is the same for every starting vector.
WindingRelation winding_relation_check(const FieldProgram& program, double tau,
                                       const Eigen::Vector3d& e0,
                                       const CyclicOptions& options = {});

}  // namespace spinevo
