#include "ehsim/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ehsim/error.hpp"

namespace ehsim::waveform {

namespace {

constexpr double kDenseRateHz = 100e3;
constexpr long kMaxDenseSamples = 20'000'000;
constexpr int kMaxRationalDenominator = 1000;

}  // namespace

void check_parameters(const CompositeWaveform& w) {
  const auto& sq = w.square;
  if (!(std::isfinite(sq.frequency) && sq.frequency > 0.0)) {
    throw ValidationError("square.frequency", "must be > 0");
  }
  if (!(std::isfinite(sq.amplitude) && sq.amplitude >= 0.0)) {
    throw ValidationError("square.amplitude", "must be >= 0");
  }
  if (!(sq.slew_rate > 0.0)) throw ValidationError("square.slew_rate", "must be > 0");
  const double reversal_ms = 2.0 * sq.amplitude / sq.slew_rate;
  const double half_period_ms = 500.0 / sq.frequency;
  if (reversal_ms >= half_period_ms) {
    throw ValidationError("square.slew_rate", "polarity reversal does not fit in half a period");
  }
  if (w.overlay) {
    if (!(std::isfinite(w.overlay->frequency) && w.overlay->frequency > 0.0)) {
      throw ValidationError("overlay.frequency", "must be > 0");
    }
    if (!(std::isfinite(w.overlay->amplitude) && w.overlay->amplitude >= 0.0)) {
      throw ValidationError("overlay.amplitude", "must be >= 0");
    }
    if (!std::isfinite(w.overlay->phase)) throw ValidationError("overlay.phase", "must be finite");
  }
  if (!(w.breakdown_limit > 0.0)) throw ValidationError("breakdown_limit", "must be > 0");
}

double common_period(const CompositeWaveform& w) {
  const double square_period = 1.0 / w.square.frequency;
  if (!w.overlay) return square_period;
  const double overlay_period = 1.0 / w.overlay->frequency;
  // Smallest q with q·(f_sq/f_ov) integral: q overlay periods hold p square periods.
  const double ratio = w.square.frequency / w.overlay->frequency;
  for (int q = 1; q <= kMaxRationalDenominator; ++q) {
    const double p = ratio * q;
    if (std::abs(p - std::round(p)) <= 1e-9 * std::max(1.0, p)) return q * overlay_period;
  }
  return std::max(1.0, 10.0 * std::max(square_period, overlay_period));
}

double sample_square(const SquareWaveSpec& sq, double t) {
  const double a = sq.amplitude;
  if (a == 0.0) return 0.0;
  const double period = 1.0 / sq.frequency;
  double cycles = t / period;
  double frac = cycles - std::floor(cycles);
  double sign = 1.0;
  if (frac >= 0.5) {
    frac -= 0.5;
    sign = -1.0;
  }
  if (!std::isfinite(sq.slew_rate)) return sign * a;
  // Odd-symmetric trapezoid: ramp through zero at each half-period boundary.
  const double phase_ms = frac * period * 1e3;
  const double half_ms = 0.5 * period * 1e3;
  const double v = std::min({a, sq.slew_rate * phase_ms, sq.slew_rate * (half_ms - phase_ms)});
  return sign * v;
}

double sample_voltage(const CompositeWaveform& w, double t) {
  double u = sample_square(w.square, t);
  if (w.overlay) {
    const auto& o = w.overlay;
    u += o->amplitude * std::sin(2.0 * std::numbers::pi * o->frequency * t + o->phase);
  }
  return u;
}

ValidationReport validate_waveform(const CompositeWaveform& w) {
  check_parameters(w);
  ValidationReport r;
  r.common_period = common_period(w);
  r.analytic_bound = w.square.amplitude + (w.overlay ? w.overlay->amplitude : 0.0);
  const long n = std::clamp(static_cast<long>(std::ceil(r.common_period * kDenseRateHz)), 10000L,
                            kMaxDenseSamples);
  double peak = 0.0;
  for (long i = 0; i < n; ++i) {
    const double t = r.common_period * static_cast<double>(i) / static_cast<double>(n);
    peak = std::max(peak, std::abs(sample_voltage(w, t)));
  }
  r.sampled_peak = peak;
  r.peak = r.analytic_bound;
  if (r.analytic_bound <= w.breakdown_limit) return r;

  // The bound is pessimistic when square plateaus and overlay crests never align.
  r.peak = peak;
  if (peak > w.breakdown_limit) {
    throw BreakdownRisk("drive peak " + std::to_string(peak) + " kV exceeds breakdown limit " +
                            std::to_string(w.breakdown_limit) + " kV",
                        peak);
  }
  return r;
}

}  // namespace ehsim::waveform
