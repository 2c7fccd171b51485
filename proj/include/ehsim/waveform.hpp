#pragma once

#include <optional>

namespace ehsim::waveform {

// AC square drive with finite-rate polarity reversals. slew_rate may be
// +infinity for an ideal square.
struct SquareWaveSpec {
  double frequency = 20.0;   // Hz
  double amplitude = 3.5;    // kV
  double slew_rate = 10.0;   // kV/ms
};

struct SineOverlay {
  double frequency = 5.0;  // Hz
  double amplitude = 2.5;  // kV
  double phase = 0.0;      // rad, 0 = starts upward
};

struct CompositeWaveform {
  SquareWaveSpec square;
  std::optional<SineOverlay> overlay;
  double breakdown_limit = 7.0;  // kV
};

struct ValidationReport {
  double common_period = 0.0;  // s
  double analytic_bound = 0.0; // kV, |square| + |overlay| amplitudes
  double sampled_peak = 0.0;   // kV, max |u| over dense samples of one common period
  double peak = 0.0;           // value compared against the limit
};

/// Checks parameter invariants (frequencies > 0, amplitudes >= 0, slew edges
/// shorter than half a period). Throws ValidationError.
void check_parameters(const CompositeWaveform& w);

/// Least period shared by the square and the overlay, in seconds. Falls back to
/// a 1 s window when the frequency ratio is not a small rational.
double common_period(const CompositeWaveform& w);

/// Slew-limited square component at time t (s).
double sample_square(const SquareWaveSpec& sq, double t);

/// u0(t) in kV: square plus optional overlay.
double sample_voltage(const CompositeWaveform& w, double t);

/// Throws BreakdownRisk carrying the peak when |u| can exceed breakdown_limit.
ValidationReport validate_waveform(const CompositeWaveform& w);

}  // namespace ehsim::waveform
