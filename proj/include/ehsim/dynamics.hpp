#pragma once

#include <span>
#include <vector>

#include "ehsim/mechanism.hpp"
#include "ehsim/waveform.hpp"

namespace ehsim::dynamics {

enum class PlantIntegrator {
  ExactExponential,  // zero-order-hold exact update, samples lie on the continuous curve
  ForwardEuler,
};

// First-order force lag between the static force map and the load cell.
struct PlantParams {
  double time_constant = 24.1;  // ms; 10-90% rise = τ·ln 9 ≈ 53 ms
  double sample_period = 1.0;   // ms
  PlantIntegrator integrator = PlantIntegrator::ExactExponential;

  /// Requires τ > 0 and 0 < dt <= τ/5.
  void validate() const;
  /// Fraction of the remaining gap closed per step.
  double blend() const;
};

double plant_step(const PlantParams& p, double force, double static_target);

// Gains act on force error in N and produce kV. The integral term accumulates
// the raw error once per control cycle.
struct PiGains {
  double kp = 0.75;
  double ki = 0.035;
  double output_min = 0.0;  // kV; actuators only push
  double output_max = 6.0;  // kV

  void validate() const;
};

struct ControllerState {
  double integral_accumulator = 0.0;  // N·cycles
  double last_output = 0.0;           // kV
};

struct PiResult {
  double voltage;
  ControllerState state;
};

/// One PI cycle with output clamping and conditional integration: the
/// accumulator is frozen while the output is saturated in the error's direction.
PiResult pi_step(const PiGains& g, const ControllerState& state, double error);

struct TraceRecord {
  double t_ms;
  double target_force;
  double actual_force;
  double voltage;
  double displacement;
};

struct SimTrace {
  double dt_ms = 1.0;
  std::vector<TraceRecord> records;

  /// Throws TraceError unless t starts at 0, steps by dt and all values are finite.
  void check() const;
  std::vector<double> actual_forces() const;
};

double static_force_map(const mechanism::DeviceConfig& dev, double displacement, double voltage_kv);

SimTrace simulate_step_response(const mechanism::DeviceConfig& dev, const PlantParams& p,
                                double step_voltage, double displacement, double duration_ms,
                                double breakdown_limit = 7.0);

/// 10-90% rise time of the actual-force column, linear interpolation between samples.
double measure_rise_time(const SimTrace& trace);

enum class TargetShape { Constant, Sine, Square, Triangle };

struct TargetWave {
  TargetShape shape = TargetShape::Sine;
  double frequency = 0.08;  // Hz
  double amplitude = 0.5;   // N
  double offset = 0.6;      // N

  double value(double t_s) const;
  double max_value() const;
  double min_value() const;
};

/// Closed-loop force tracking at fixed pinch displacement. Throws
/// CapabilityError when the target leaves [0, static force at output_max].
SimTrace simulate_tracking(const mechanism::DeviceConfig& dev, const PlantParams& p,
                           const PiGains& g, const TargetWave& target, double displacement,
                           double duration_ms);

/// Open-loop drive with a composite waveform at fixed pinch displacement.
/// target_force logs the instantaneous static force.
SimTrace simulate_vibration(const mechanism::DeviceConfig& dev, const PlantParams& p,
                            const waveform::CompositeWaveform& w, double displacement,
                            double duration_ms);

/// RMS of target - actual over records with t >= from_ms.
double rms_tracking_error(const SimTrace& trace, double from_ms);

struct EdgeSettling {
  double edge_ms;
  bool rising;
  double step;        // new level - old level, N
  double settle_ms;   // time until |F - level| stays within tolerance·|step|
  bool settled;       // false if the band was never held before the next edge
};

std::vector<EdgeSettling> edge_settling_times(const SimTrace& trace, double tolerance = 0.02);

struct RippleResult {
  bool has_peak = false;
  double dominant_frequency = 0.0;  // Hz
  double amplitude = 0.0;           // N, half peak-to-peak of the band-passed signal
};

/// Dominant in-band frequency and ripple amplitude of a uniformly sampled
/// signal. The first 20% is discarded as transient.
RippleResult ripple_analysis(std::span<const double> samples, double dt_ms, double band_low_hz,
                             double band_high_hz);
RippleResult ripple_analysis(const SimTrace& trace, double band_low_hz, double band_high_hz);

}  // namespace ehsim::dynamics
