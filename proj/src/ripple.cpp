#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "ehsim/dynamics.hpp"
#include "ehsim/error.hpp"

namespace ehsim::dynamics {

namespace {

constexpr double kTransientFraction = 0.2;
constexpr double kEdgeTrimFraction = 0.1;
constexpr double kMinPeriodsOfLowEdge = 5.0;

}  // namespace

RippleResult ripple_analysis(std::span<const double> samples, double dt_ms, double band_low_hz,
                             double band_high_hz) {
  if (!(dt_ms > 0.0)) throw ValidationError("dt_ms", "must be > 0");
  if (!(band_low_hz > 0.0 && band_high_hz > band_low_hz)) {
    throw ValidationError("band", "need 0 < low < high");
  }
  const std::size_t skip = static_cast<std::size_t>(kTransientFraction * samples.size());
  const auto window = samples.subspan(skip);
  const std::size_t n = window.size();
  const double dt_s = dt_ms * 1e-3;
  const double duration_s = static_cast<double>(n) * dt_s;
  if (n < 8 || duration_s * band_low_hz < kMinPeriodsOfLowEdge) {
    throw TraceError("ripple analysis needs >= " + std::to_string(kMinPeriodsOfLowEdge) +
                     " periods of " + std::to_string(band_low_hz) + " Hz after the transient");
  }

  double mean = 0.0;
  for (double v : window) mean += v;
  mean /= static_cast<double>(n);

  // Band bins only, excluding DC and everything at or above Nyquist.
  const auto k_lo = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(band_low_hz * duration_s)));
  const auto k_hi = std::min<std::size_t>((n - 1) / 2,
                                          static_cast<std::size_t>(std::floor(band_high_hz * duration_s)));
  if (k_lo > k_hi) throw TraceError("band holds no frequency bin for this window");

  std::vector<std::complex<double>> twiddle(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
    twiddle[m] = {std::cos(angle), std::sin(angle)};
  }

  std::vector<std::complex<double>> bins;
  bins.reserve(k_hi - k_lo + 1);
  double best_mag = 0.0;
  std::size_t best_k = 0;
  for (std::size_t k = k_lo; k <= k_hi; ++k) {
    std::complex<double> acc{0.0, 0.0};
    std::size_t idx = 0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += (window[i] - mean) * twiddle[idx];
      idx += k;
      if (idx >= n) idx -= n;
    }
    bins.push_back(acc);
    const double mag = std::abs(acc);
    if (mag > best_mag) {
      best_mag = mag;
      best_k = k;
    }
  }

  RippleResult result;
  const double scale = std::max(1.0, std::abs(mean));
  if (best_mag / static_cast<double>(n) <= 1e-12 * scale) return result;

  result.has_peak = true;
  result.dominant_frequency = static_cast<double>(best_k) / duration_s;

  // Band-passed reconstruction; peak-to-peak over the central part of the window.
  const std::size_t trim = static_cast<std::size_t>(kEdgeTrimFraction * n);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = trim; i < n - trim; ++i) {
    double v = 0.0;
    for (std::size_t b = 0; b < bins.size(); ++b) {
      const std::size_t k = k_lo + b;
      // e^{+i 2π k i / n} is the conjugate of the forward twiddle.
      v += (bins[b] * std::conj(twiddle[(k * i) % n])).real();
    }
    v *= 2.0 / static_cast<double>(n);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  result.amplitude = 0.5 * (hi - lo);
  return result;
}

RippleResult ripple_analysis(const SimTrace& trace, double band_low_hz, double band_high_hz) {
  const auto forces = trace.actual_forces();
  return ripple_analysis(forces, trace.dt_ms, band_low_hz, band_high_hz);
}

}  // namespace ehsim::dynamics
