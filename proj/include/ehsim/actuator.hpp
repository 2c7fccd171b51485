#pragma once

#include <optional>
#include <span>
#include <vector>

namespace ehsim::actuator {

// Bladder geometry of one actuator. Lengths in mm, volume in mm^3.
struct ActuatorGeometry {
  double oil_volume = 2500.0;
  double bladder_width = 12.5;   // width of one lateral bladder
  double bladder_length = 50.0;

  /// Throws InvalidGeometry if any dimension is non-positive or non-finite.
  void validate() const;
};

// Parallel-plate parameters. The main pipeline never uses these: the mixing
// parameter K lumps εr, ε0 and the unknown residual-oil thickness d.
struct DielectricParams {
  double vacuum_permittivity = 8.8541878128e-12;  // F/m
  double relative_permittivity = 3.4;             // polyimide
  std::optional<double> overlap_area;             // mm^2
  std::optional<double> thickness;                // mm
};

struct CalibrationParams {
  double mixing_parameter = 9.828e-5;  // K, N mm^-2 kV^-2
  double calibration_voltage = 6.0;    // kV
};

struct SqueezeState {
  double delta_h = 0.0;       // mm
  double delta_x = 0.0;       // mm
  double area_lost = 0.0;     // ΔS1, mm^2 (cross-section)
  double area_gained = 0.0;   // ΔS2, mm^2
  double squeezed_area = 0.0; // S_HA, mm^2
};

enum class DisplacementConvention {
  TotalAsDeltaH,     // the whole measured displacement is Δh
  PerActuatorShare,  // Δh = D / N
};

struct StackConfig {
  int actuator_count = 3;
  DisplacementConvention convention = DisplacementConvention::TotalAsDeltaH;
  double preload_displacement = 0.05;  // mm

  void validate() const;
  /// Effective per-actuator Δh for a total stack displacement.
  double effective_delta_h(double total_displacement) const;
};

struct MeasurementPoint {
  double displacement;  // mm
  double force;         // N
};

double expanded_half_height(const ActuatorGeometry& geom);
double wedge_angle(const ActuatorGeometry& geom);

/// Lateral advance Δx of the inner bladder wall that keeps the cross-section
/// area constant. Valid for 0 <= Δh < h; throws DomainError otherwise.
double lateral_advance(const ActuatorGeometry& geom, double delta_h);
double squeezed_area(const ActuatorGeometry& geom, double delta_h);
SqueezeState squeeze_state(const ActuatorGeometry& geom, double delta_h);

/// Bladder pressure P = K u^2 in N/mm^2 (u in kV).
double maxwell_pressure(const CalibrationParams& cal, double voltage_kv);

/// Electrostatic adhesion force of the parallel-plate model, in N. Area and
/// thickness are read in mm and converted to SI with ε0 in F/m.
double maxwell_force_explicit(const DielectricParams& diel, double voltage_kv);

/// Feedback force of one actuator squeezed by Δh at voltage u: F = 2 P S_HA.
double single_actuator_force(const ActuatorGeometry& geom, const CalibrationParams& cal,
                             double delta_h, double voltage_kv);

/// Force transmitted by a series stack. Every actuator in series carries the same force.
double stack_force(const StackConfig& stack, const ActuatorGeometry& geom,
                   const CalibrationParams& cal, double total_displacement, double voltage_kv);

/// Closed-form least-squares fit of K to (displacement, force) pairs measured at u_cal.
CalibrationParams calibrate_k(std::span<const MeasurementPoint> points, double calibration_voltage,
                              const ActuatorGeometry& geom, const StackConfig& stack);

/// Averaged pre-experiment data: squeeze displacement (mm) vs force (N) of a
/// three-actuator stack, three repetitions each.
std::vector<MeasurementPoint> reference_squeeze_table();

/// Individual repetitions behind reference_squeeze_table(), row-major per displacement.
struct SqueezeTableRow {
  double displacement;
  double repetitions[3];
  double average;
};
std::vector<SqueezeTableRow> reference_squeeze_table_raw();

}  // namespace ehsim::actuator
