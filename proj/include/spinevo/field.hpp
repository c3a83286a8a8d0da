#pragma once

// Magnetic-field programs in precession-frequency form: omega_B(t) in rad/s
// and a unit direction n(t), declared on a closed time domain [0, t_max].

#include <Eigen/Dense>

#include <string_view>
#include <variant>
#include <vector>

namespace spinevo {

/// Scalar function of time drawn from a small closed-form library.
///
///   constant     [c]                       -> c
///   polynomial   [c0, c1, ...]             -> c0 + c1 t + c2 t^2 + ...
///   sinusoid     [a0, a1, freq, phase]     -> a0 + a1 sin(freq t + phase)
///   trig_series  [a0, a1, (amp, freq, phase)...]
///                                          -> a0 + a1 t + sum amp sin(freq t + phase)
struct ScalarProfile {
  enum class Form { constant, polynomial, sinusoid, trig_series };

  Form form = Form::constant;
  std::vector<double> coefficients{0.0};

  static ScalarProfile constant(double c) { return {Form::constant, {c}}; }
  static ScalarProfile sinusoid(double offset, double amplitude, double freq, double phase = 0.0) {
    return {Form::sinusoid, {offset, amplitude, freq, phase}};
  }

  double operator()(double t) const;
  void validate() const;

  bool operator==(const ScalarProfile&) const = default;
};

std::string_view to_string(ScalarProfile::Form form);

struct FixedAxisField {
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();
  ScalarProfile omega;

  bool operator==(const FixedAxisField&) const = default;
};

/// n(t) = (sin a cos wt, sin a sin wt, cos a) at constant magnitude omega_b0.
struct RotatingField {
  double cone_angle = 0.0;
  double rate = 0.0;
  double omega_b0 = 0.0;

  bool operator==(const RotatingField&) const = default;
};

/// Smooth closed-form direction n(t) = (polar(t), azimuth(t)) in spherical
/// angles, with magnitude omega(t).
struct WobblingField {
  ScalarProfile omega;
  ScalarProfile polar;
  ScalarProfile azimuth;

  bool operator==(const WobblingField&) const = default;
};

/// Samples of (omega_B, n); between samples omega_B n is interpolated
/// linearly and split back into magnitude and direction.
struct SampledField {
  std::vector<double> times;
  std::vector<double> omega;
  std::vector<Eigen::Vector3d> axis;

  bool operator==(const SampledField&) const = default;
};

class FieldProgram;

struct PiecewiseField {
  std::vector<double> durations;
  std::vector<FieldProgram> segments;

  bool operator==(const PiecewiseField&) const;
};

struct FieldSample {
  double omega_b = 0.0;
  Eigen::Vector3d n = Eigen::Vector3d::UnitZ();
};

class FieldProgram {
 public:
  using Variant =
      std::variant<FixedAxisField, RotatingField, WobblingField, SampledField, PiecewiseField>;

  static constexpr double kDefaultContinuityTol = 1e-6;

  /// Validates the program; throws Error on malformed content.
  FieldProgram(Variant definition, double t_max, double continuity_tol = kDefaultContinuityTol);

  static FieldProgram fixed_axis(const Eigen::Vector3d& axis, ScalarProfile omega, double t_max);
  static FieldProgram zero(double t_max);
  static FieldProgram rotating(double cone_angle, double rate, double omega_b0, double t_max);
  static FieldProgram wobbling(ScalarProfile omega, ScalarProfile polar, ScalarProfile azimuth,
                               double t_max);
  static FieldProgram sampled(SampledField samples, double t_max);
  /// t_max is the sum of the segment durations.
  static FieldProgram piecewise(std::vector<double> durations, std::vector<FieldProgram> segments,
                                double continuity_tol = kDefaultContinuityTol);

  FieldSample evaluate(double t) const;

  double t_max() const { return t_max_; }
  double continuity_tol() const { return continuity_tol_; }
  const Variant& definition() const { return definition_; }
  std::string_view kind_name() const;

  bool operator==(const FieldProgram& other) const;

 private:
  FieldSample evaluate_unchecked(double t) const;

  Variant definition_;
  double t_max_ = 0.0;
  double continuity_tol_ = kDefaultContinuityTol;
};

}  // namespace spinevo
