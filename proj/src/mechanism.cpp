#include "ehsim/mechanism.hpp"

#include <cmath>
#include <string>

#include "ehsim/error.hpp"

namespace ehsim::mechanism {

namespace {

void check_pinch(const MechanismGeometry& g, double pinch_mm) {
  if (!std::isfinite(pinch_mm) || pinch_mm < 0.0) {
    throw DomainError("pinch displacement must be >= 0, got " + std::to_string(pinch_mm) + " mm");
  }
  if (pinch_mm > g.vertical_offset) {
    throw DomainError("pinch displacement " + std::to_string(pinch_mm) +
                      " mm exceeds the vertical offset " + std::to_string(g.vertical_offset) + " mm");
  }
}

}  // namespace

void MechanismGeometry::validate() const {
  if (!(std::isfinite(rod_length) && rod_length > 0.0)) {
    throw InvalidGeometry("rod_length must be > 0");
  }
  if (!(std::isfinite(vertical_offset) && vertical_offset > 0.0 && vertical_offset <= rod_length)) {
    throw InvalidGeometry("vertical_offset must satisfy 0 < L <= R");
  }
  if (!(std::isfinite(max_pinch_stroke) && max_pinch_stroke > 0.0 &&
        max_pinch_stroke <= vertical_offset)) {
    throw InvalidGeometry("max_pinch_stroke must satisfy 0 < stroke <= L");
  }
}

void DeviceConfig::validate() const {
  geometry.validate();
  stack.validate();
  actuator.validate();
  if (!(calibration.mixing_parameter > 0.0)) {
    throw ValidationError("mixing_parameter", "K must be > 0");
  }
}

double plate_displacement(const MechanismGeometry& g, double pinch_mm) {
  g.validate();
  check_pinch(g, pinch_mm);
  const double r2 = g.rod_length * g.rod_length;
  const double rest = g.vertical_offset - pinch_mm;
  const double arg = r2 - rest * rest;
  if (arg < 0.0) throw DomainError("rod cannot reach: R^2 < (L - pinch)^2");
  return std::sqrt(arg) - std::sqrt(r2 - g.vertical_offset * g.vertical_offset);
}

double rod_angle(const MechanismGeometry& g, double pinch_mm) {
  g.validate();
  check_pinch(g, pinch_mm);
  return std::asin((g.vertical_offset - pinch_mm) / g.rod_length);
}

double rod_force(double actuator_force, double theta) {
  return actuator_force * std::sin(theta);
}

double user_force(double actuator_force, double theta) {
  return 2.0 * rod_force(actuator_force, theta) * std::sin(theta);
}

StaticBreakdown device_static_breakdown(const DeviceConfig& dev, double pinch_mm,
                                        double voltage_kv) {
  StaticBreakdown b;
  b.pinch_displacement = pinch_mm;
  try {
    b.plate_displacement = plate_displacement(dev.geometry, pinch_mm);
    b.rod_angle = rod_angle(dev.geometry, pinch_mm);
  } catch (const DomainError& e) {
    throw DomainError(std::string("mechanism stage: ") + e.what());
  }
  b.stack_displacement = dev.stack.preload_displacement + b.plate_displacement;
  try {
    b.actuator_force = actuator::stack_force(dev.stack, dev.actuator, dev.calibration,
                                             b.stack_displacement, voltage_kv);
  } catch (const DomainError& e) {
    throw DomainError(std::string("actuator stage: ") + e.what());
  }
  b.user_force = user_force(b.actuator_force, b.rod_angle);
  return b;
}

double device_static_force(const DeviceConfig& dev, double pinch_mm, double voltage_kv) {
  return device_static_breakdown(dev, pinch_mm, voltage_kv).user_force;
}

}  // namespace ehsim::mechanism
