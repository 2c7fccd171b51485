#pragma once

#include "ehsim/actuator.hpp"

namespace ehsim::mechanism {

// Pinch linkage: the pinch platform moves vertically, two rods of length R
// push the squeeze plates outward into the actuator stacks.
struct MechanismGeometry {
  double rod_length = 35.0;        // R, mm
  double vertical_offset = 15.0;   // L, mm
  double max_pinch_stroke = 15.0;  // mm

  void validate() const;
};

// Symmetric two-sided device. One stack description serves both sides.
struct DeviceConfig {
  MechanismGeometry geometry;
  actuator::StackConfig stack;
  actuator::ActuatorGeometry actuator;
  actuator::CalibrationParams calibration;

  void validate() const;
};

double plate_displacement(const MechanismGeometry& g, double pinch_mm);
double rod_angle(const MechanismGeometry& g, double pinch_mm);
double rod_force(double actuator_force, double theta);
double user_force(double actuator_force, double theta);

// Intermediate values of the device static map, kept for sweeps and reports.
struct StaticBreakdown {
  double pinch_displacement = 0.0;  // mm
  double plate_displacement = 0.0;  // mm
  double stack_displacement = 0.0;  // preload + plate displacement, mm
  double rod_angle = 0.0;           // rad
  double actuator_force = 0.0;      // N, one side
  double user_force = 0.0;          // N
};

StaticBreakdown device_static_breakdown(const DeviceConfig& dev, double pinch_mm, double voltage_kv);

/// Force felt by the finger at pinch displacement Δx_p under voltage u.
/// Domain errors are re-thrown with the failing stage in the message.
double device_static_force(const DeviceConfig& dev, double pinch_mm, double voltage_kv);

}  // namespace ehsim::mechanism
