#include "ehsim/actuator.hpp"

#include <cmath>
#include <string>

#include "ehsim/error.hpp"
#include "ehsim/units.hpp"

namespace ehsim::actuator {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

void check_squeeze_domain(double h, double delta_h) {
  if (!std::isfinite(delta_h) || delta_h < 0.0) {
    throw DomainError("squeeze displacement must be >= 0, got " + std::to_string(delta_h) + " mm");
  }
  if (delta_h >= h) {
    throw DomainError("squeeze displacement " + std::to_string(delta_h) +
                      " mm reaches the expanded half-height " + std::to_string(h) +
                      " mm (bladder fully collapsed)");
  }
}

}  // namespace

void ActuatorGeometry::validate() const {
  if (!positive_finite(oil_volume)) throw InvalidGeometry("oil_volume must be > 0");
  if (!positive_finite(bladder_width)) throw InvalidGeometry("bladder_width must be > 0");
  if (!positive_finite(bladder_length)) throw InvalidGeometry("bladder_length must be > 0");
}

void StackConfig::validate() const {
  if (actuator_count < 1) throw ValidationError("actuator_count", "must be >= 1");
  if (!std::isfinite(preload_displacement) || preload_displacement < 0.0) {
    throw ValidationError("preload_displacement", "must be >= 0");
  }
}

double StackConfig::effective_delta_h(double total_displacement) const {
  switch (convention) {
    case DisplacementConvention::TotalAsDeltaH:
      return total_displacement;
    case DisplacementConvention::PerActuatorShare:
      return total_displacement / static_cast<double>(actuator_count);
  }
  return total_displacement;
}

double expanded_half_height(const ActuatorGeometry& geom) {
  geom.validate();
  return geom.oil_volume / (2.0 * geom.bladder_width * geom.bladder_length);
}

double wedge_angle(const ActuatorGeometry& geom) {
  const double h = expanded_half_height(geom);
  return std::atan(2.0 * h / geom.bladder_width);
}

SqueezeState squeeze_state(const ActuatorGeometry& geom, double delta_h) {
  const double h = expanded_half_height(geom);
  check_squeeze_domain(h, delta_h);
  // tan α = 2h/x; use it directly instead of tan(atan(.)).
  const double tan_alpha = 2.0 * h / geom.bladder_width;

  SqueezeState s;
  s.delta_h = delta_h;
  s.area_lost = delta_h * delta_h / tan_alpha;
  s.delta_x = s.area_lost / (h - delta_h);
  s.area_gained = s.delta_x * (h - delta_h);
  s.squeezed_area = (2.0 * delta_h / tan_alpha + s.delta_x) * geom.bladder_length;
  return s;
}

double lateral_advance(const ActuatorGeometry& geom, double delta_h) {
  return squeeze_state(geom, delta_h).delta_x;
}

double squeezed_area(const ActuatorGeometry& geom, double delta_h) {
  return squeeze_state(geom, delta_h).squeezed_area;
}

double maxwell_pressure(const CalibrationParams& cal, double voltage_kv) {
  if (!positive_finite(cal.mixing_parameter)) {
    throw ValidationError("mixing_parameter", "K must be > 0");
  }
  return cal.mixing_parameter * voltage_kv * voltage_kv;
}

double maxwell_force_explicit(const DielectricParams& diel, double voltage_kv) {
  if (!diel.overlap_area) throw MissingParameter("electrode overlap area is not set");
  if (!diel.thickness) throw MissingParameter("dielectric thickness is not set");
  if (diel.relative_permittivity < 1.0) {
    throw ValidationError("relative_permittivity", "must be >= 1");
  }
  if (*diel.overlap_area < 0.0) throw ValidationError("overlap_area", "must be >= 0");
  if (!positive_finite(*diel.thickness)) throw ValidationError("thickness", "must be > 0");

  const double area_m2 = *diel.overlap_area * 1e-6;
  const double d_m = units::m_from_mm(*diel.thickness);
  const double u_v = units::v_from_kv(voltage_kv);
  return 0.5 * diel.relative_permittivity * diel.vacuum_permittivity * area_m2 * u_v * u_v /
         (d_m * d_m);
}

double single_actuator_force(const ActuatorGeometry& geom, const CalibrationParams& cal,
                             double delta_h, double voltage_kv) {
  return 2.0 * maxwell_pressure(cal, voltage_kv) * squeezed_area(geom, delta_h);
}

double stack_force(const StackConfig& stack, const ActuatorGeometry& geom,
                   const CalibrationParams& cal, double total_displacement, double voltage_kv) {
  stack.validate();
  if (!std::isfinite(total_displacement) || total_displacement < 0.0) {
    throw DomainError("stack displacement must be >= 0");
  }
  return single_actuator_force(geom, cal, stack.effective_delta_h(total_displacement), voltage_kv);
}

CalibrationParams calibrate_k(std::span<const MeasurementPoint> points, double calibration_voltage,
                              const ActuatorGeometry& geom, const StackConfig& stack) {
  if (points.empty()) throw DegenerateData("calibration needs at least one point");
  if (!positive_finite(calibration_voltage)) {
    throw ValidationError("calibration_voltage", "must be > 0");
  }
  stack.validate();

  // F_i = K · (2 u^2 S_i)  =>  K = Σ F_i S_i / (2 u^2 Σ S_i^2)
  double fs = 0.0;
  double ss = 0.0;
  for (const auto& p : points) {
    const double s = squeezed_area(geom, stack.effective_delta_h(p.displacement));
    fs += p.force * s;
    ss += s * s;
  }
  if (ss == 0.0) throw DegenerateData("all calibration points have zero squeezed area");

  CalibrationParams cal;
  cal.calibration_voltage = calibration_voltage;
  cal.mixing_parameter = fs / (2.0 * calibration_voltage * calibration_voltage * ss);
  return cal;
}

std::vector<SqueezeTableRow> reference_squeeze_table_raw() {
  return {
      {0.125, {0.2785, 0.2830, 0.2750}, 0.2788},
      {0.250, {0.5260, 0.5250, 0.5273}, 0.5261},
      {0.375, {0.8552, 0.8573, 0.8573}, 0.8566},
  };
}

std::vector<MeasurementPoint> reference_squeeze_table() {
  std::vector<MeasurementPoint> out;
  for (const auto& row : reference_squeeze_table_raw()) {
    out.push_back({row.displacement, row.average});
  }
  return out;
}

}  // namespace ehsim::actuator
