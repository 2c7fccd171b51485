#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ehsim/actuator.hpp"
#include "ehsim/dynamics.hpp"
#include "ehsim/mechanism.hpp"
#include "ehsim/teleop/session.hpp"
#include "ehsim/waveform.hpp"

namespace ehsim::config {

struct ActuatorSection {
  actuator::ActuatorGeometry geometry;
  actuator::CalibrationParams calibration;
  actuator::StackConfig stack;  // used by the device static map and by calibration
};

struct MechanismSection {
  mechanism::MechanismGeometry geometry;
  // Stroke sweep (max-force) stacks: the device carries this many actuators per side.
  int actuators_per_side = 30;
  actuator::DisplacementConvention sweep_convention =
      actuator::DisplacementConvention::PerActuatorShare;
  double sweep_voltage = 6.0;   // kV
  double sweep_step = 0.1;      // mm
  // Fixed pinch displacement for step, tracking and vibration runs.
  double operating_displacement = 3.0;  // mm
};

struct PlantSection {
  dynamics::PlantParams params;
  double step_voltage = 6.0;  // kV
};

struct ControllerSection {
  dynamics::PiGains gains;
  dynamics::TargetWave target;
};

struct WaveformSection {
  waveform::CompositeWaveform drive{{20.0, 3.5, 10.0}, waveform::SineOverlay{5.0, 2.5, 0.0}, 7.0};
  double band_low = 2.0;    // Hz
  double band_high = 100.0; // Hz
};

struct TeleopSection {
  teleop::ChannelModel channel;
  double stale_timeout = 100.0;  // ms
  teleop::SlaveParams slave;
  std::vector<teleop::VirtualObject> objects = default_objects();
  std::string object = "spring-0.5mm-wire";
  teleop::OperatorProfile profile;

  static std::vector<teleop::VirtualObject> default_objects();
  const teleop::VirtualObject& selected_object() const;
};

struct ExperimentConfig {
  ActuatorSection actuator;
  MechanismSection mechanism;
  PlantSection plant;
  ControllerSection controller;
  WaveformSection waveform;
  TeleopSection teleop;
  std::uint64_t seed = 1;

  mechanism::DeviceConfig device() const;
  /// Device used for the stroke sweep: same hardware with the sweep stack convention.
  mechanism::DeviceConfig sweep_device() const;
  teleop::SessionConfig session(const teleop::VirtualObject& object) const;

  /// Section invariants; errors name the offending field as section.key.
  void validate() const;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Parses JSON text. Absent keys take defaults; unknown keys are rejected.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& cfg);

std::string to_string(actuator::DisplacementConvention c);
std::string to_string(dynamics::TargetShape s);
std::string to_string(dynamics::PlantIntegrator i);

}  // namespace ehsim::config
