#include "spinevo/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "spinevo/error.hpp"
#include "spinevo/spinalg.hpp"

namespace spinevo {

namespace {

// Stage times of a step ending exactly at t_max may overshoot by rounding.
constexpr double kDomainSlack = 1e-12;

void require_unit_axis(const Eigen::Vector3d& axis, const char* what) {
  const double norm = axis.norm();
  if (!(std::abs(norm - 1.0) <= 1e-9)) {
    throw Error(ErrorCode::non_unit_axis,
                std::string(what) + ": non-unit axis (norm " + std::to_string(norm) + ")");
  }
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw Error(ErrorCode::configuration, std::string(what) + " must be finite");
  }
}

}  // namespace

std::string_view to_string(ScalarProfile::Form form) {
  switch (form) {
    case ScalarProfile::Form::constant: return "constant";
    case ScalarProfile::Form::polynomial: return "polynomial";
    case ScalarProfile::Form::sinusoid: return "sinusoid";
    case ScalarProfile::Form::trig_series: return "trig_series";
  }
  return "constant";
}

void ScalarProfile::validate() const {
  const auto n = coefficients.size();
  bool ok = false;
  switch (form) {
    case Form::constant: ok = n == 1; break;
    case Form::polynomial: ok = n >= 1; break;
    case Form::sinusoid: ok = n == 4; break;
    case Form::trig_series: ok = n >= 2 && (n - 2) % 3 == 0; break;
  }
  if (!ok) {
    throw Error(ErrorCode::configuration, "profile form '" + std::string(to_string(form)) +
                                              "' does not accept " + std::to_string(n) +
                                              " coefficients");
  }
  for (double c : coefficients) require_finite(c, "profile coefficient");
}

double ScalarProfile::operator()(double t) const {
  const auto& c = coefficients;
  switch (form) {
    case Form::constant:
      return c[0];
    case Form::polynomial: {
      double acc = 0.0;
      for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
      return acc;
    }
    case Form::sinusoid:
      return c[0] + c[1] * std::sin(c[2] * t + c[3]);
    case Form::trig_series: {
      double acc = c[0] + c[1] * t;
      for (std::size_t i = 2; i + 2 < c.size(); i += 3) acc += c[i] * std::sin(c[i + 1] * t + c[i + 2]);
      return acc;
    }
  }
  return 0.0;
}

bool PiecewiseField::operator==(const PiecewiseField& other) const {
  return durations == other.durations && segments == other.segments;
}

FieldProgram::FieldProgram(Variant definition, double t_max, double continuity_tol)
    : definition_(std::move(definition)), t_max_(t_max), continuity_tol_(continuity_tol) {
  require_finite(t_max_, "t_max");
  if (!(t_max_ > 0.0)) throw Error(ErrorCode::configuration, "t_max must be positive");
  if (!(continuity_tol_ > 0.0)) {
    throw Error(ErrorCode::configuration, "continuity tolerance must be positive");
  }

  struct Validator {
    double t_max;
    double tol;

    void operator()(const FixedAxisField& f) const {
      require_unit_axis(f.axis, "fixed_axis");
      f.omega.validate();
    }
    void operator()(const RotatingField& f) const {
      require_finite(f.cone_angle, "cone_angle");
      require_finite(f.rate, "rate");
      require_finite(f.omega_b0, "omega_b0");
    }
    void operator()(const WobblingField& f) const {
      f.omega.validate();
      f.polar.validate();
      f.azimuth.validate();
    }
    void operator()(const SampledField& f) const {
      if (f.times.empty()) throw Error(ErrorCode::configuration, "sampled grid is empty");
      if (f.omega.size() != f.times.size() || f.axis.size() != f.times.size()) {
        throw Error(ErrorCode::configuration, "sampled arrays differ in length");
      }
      for (std::size_t i = 1; i < f.times.size(); ++i) {
        if (!(f.times[i] > f.times[i - 1])) {
          throw Error(ErrorCode::configuration, "sample times must be strictly increasing");
        }
      }
      for (std::size_t i = 0; i < f.times.size(); ++i) {
        require_finite(f.omega[i], "sampled omega_b");
        require_unit_axis(f.axis[i], "sampled");
      }
      if (f.times.front() > 0.0 || f.times.back() < t_max) {
        throw Error(ErrorCode::configuration, "samples do not cover [0, t_max]");
      }
    }
    void operator()(const PiecewiseField& f) const {
      if (f.segments.empty() || f.segments.size() != f.durations.size()) {
        throw Error(ErrorCode::configuration, "piecewise program needs one duration per segment");
      }
      for (std::size_t i = 0; i < f.segments.size(); ++i) {
        if (!(f.durations[i] > 0.0) || f.durations[i] > f.segments[i].t_max() * (1 + kDomainSlack)) {
          throw Error(ErrorCode::configuration,
                      "segment " + std::to_string(i) + " duration outside its domain");
        }
      }
      for (std::size_t i = 0; i + 1 < f.segments.size(); ++i) {
        const FieldSample end = f.segments[i].evaluate(f.durations[i]);
        const FieldSample start = f.segments[i + 1].evaluate(0.0);
        const double jump = (end.omega_b * end.n - start.omega_b * start.n).norm();
        if (jump > tol) {
          throw Error(ErrorCode::configuration,
                      "field discontinuity " + std::to_string(jump) + " between segments " +
                          std::to_string(i) + " and " + std::to_string(i + 1));
        }
      }
    }
  };
  std::visit(Validator{t_max_, continuity_tol_}, definition_);
}

FieldProgram FieldProgram::fixed_axis(const Eigen::Vector3d& axis, ScalarProfile omega,
                                      double t_max) {
  return FieldProgram(FixedAxisField{axis, std::move(omega)}, t_max);
}

FieldProgram FieldProgram::zero(double t_max) {
  return fixed_axis(Eigen::Vector3d::UnitZ(), ScalarProfile::constant(0.0), t_max);
}

FieldProgram FieldProgram::rotating(double cone_angle, double rate, double omega_b0,
                                    double t_max) {
  return FieldProgram(RotatingField{cone_angle, rate, omega_b0}, t_max);
}

FieldProgram FieldProgram::wobbling(ScalarProfile omega, ScalarProfile polar,
                                    ScalarProfile azimuth, double t_max) {
  return FieldProgram(WobblingField{std::move(omega), std::move(polar), std::move(azimuth)},
                      t_max);
}

FieldProgram FieldProgram::sampled(SampledField samples, double t_max) {
  return FieldProgram(std::move(samples), t_max);
}

FieldProgram FieldProgram::piecewise(std::vector<double> durations,
                                     std::vector<FieldProgram> segments, double continuity_tol) {
  const double total = std::accumulate(durations.begin(), durations.end(), 0.0);
  return FieldProgram(PiecewiseField{std::move(durations), std::move(segments)}, total,
                      continuity_tol);
}

std::string_view FieldProgram::kind_name() const {
  static constexpr std::string_view names[] = {"fixed_axis", "rotating", "wobbling", "sampled",
                                               "piecewise"};
  return names[definition_.index()];
}

bool FieldProgram::operator==(const FieldProgram& other) const {
  return t_max_ == other.t_max_ && continuity_tol_ == other.continuity_tol_ &&
         definition_ == other.definition_;
}

FieldSample FieldProgram::evaluate(double t) const {
  const double slack = kDomainSlack * std::max(1.0, t_max_);
  if (!(t >= -slack && t <= t_max_ + slack)) {
    throw Error(ErrorCode::domain, "t = " + std::to_string(t) + " outside field domain [0, " +
                                       std::to_string(t_max_) + "]");
  }
  return evaluate_unchecked(std::clamp(t, 0.0, t_max_));
}

FieldSample FieldProgram::evaluate_unchecked(double t) const {
  struct Evaluator {
    double t;

    FieldSample operator()(const FixedAxisField& f) const { return {f.omega(t), f.axis}; }

    FieldSample operator()(const RotatingField& f) const {
      const double s = std::sin(f.cone_angle);
      return {f.omega_b0, Eigen::Vector3d(s * std::cos(f.rate * t), s * std::sin(f.rate * t),
                                          std::cos(f.cone_angle))};
    }

    FieldSample operator()(const WobblingField& f) const {
      return {f.omega(t), unit_from_angles(f.polar(t), f.azimuth(t))};
    }

    FieldSample operator()(const SampledField& f) const {
      const auto& ts = f.times;
      if (ts.size() == 1 || t <= ts.front()) return {f.omega.front(), f.axis.front()};
      if (t >= ts.back()) return {f.omega.back(), f.axis.back()};
      const auto hi = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
      const std::size_t lo = hi - 1;
      const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
      const Eigen::Vector3d field =
          (1.0 - w) * f.omega[lo] * f.axis[lo] + w * f.omega[hi] * f.axis[hi];
      const double magnitude = field.norm();
      if (magnitude == 0.0) return {0.0, w < 0.5 ? f.axis[lo] : f.axis[hi]};
      return {magnitude, field / magnitude};
    }

    FieldSample operator()(const PiecewiseField& f) const {
      double start = 0.0;
      for (std::size_t i = 0; i < f.segments.size(); ++i) {
        const double end = start + f.durations[i];
        if (t <= end || i + 1 == f.segments.size()) {
          return f.segments[i].evaluate(std::min(t - start, f.durations[i]));
        }
        start = end;
      }
      return {};
    }
  };
  return std::visit(Evaluator{t}, definition_);
}

}  // namespace spinevo
