#include "ehsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "ehsim/error.hpp"

namespace ehsim::dynamics {

namespace {

std::size_t step_count(double duration_ms, double dt_ms) {
  if (!(std::isfinite(duration_ms) && duration_ms >= 0.0)) {
    throw ValidationError("duration", "must be >= 0");
  }
  return static_cast<std::size_t>(std::llround(duration_ms / dt_ms));
}

}  // namespace

void PlantParams::validate() const {
  if (!(std::isfinite(time_constant) && time_constant > 0.0)) {
    throw ValidationError("time_constant", "must be > 0");
  }
  if (!(std::isfinite(sample_period) && sample_period > 0.0)) {
    throw ValidationError("sample_period", "must be > 0");
  }
  if (sample_period > time_constant / 5.0) {
    throw ValidationError("sample_period", "must be <= time_constant / 5");
  }
}

double PlantParams::blend() const {
  switch (integrator) {
    case PlantIntegrator::ForwardEuler:
      return sample_period / time_constant;
    case PlantIntegrator::ExactExponential:
      return -std::expm1(-sample_period / time_constant);
  }
  return sample_period / time_constant;
}

double plant_step(const PlantParams& p, double force, double static_target) {
  return force + p.blend() * (static_target - force);
}

void PiGains::validate() const {
  if (!(std::isfinite(kp) && kp >= 0.0)) throw ValidationError("kp", "must be >= 0");
  if (!(std::isfinite(ki) && ki >= 0.0)) throw ValidationError("ki", "must be >= 0");
  if (!(std::isfinite(output_min) && std::isfinite(output_max) && output_min < output_max)) {
    throw ValidationError("output_max", "output_min must be < output_max");
  }
}

PiResult pi_step(const PiGains& g, const ControllerState& state, double error) {
  const double candidate = g.kp * error + g.ki * (state.integral_accumulator + error);
  const double voltage = std::clamp(candidate, g.output_min, g.output_max);

  const bool pushing_high = candidate > g.output_max && error > 0.0;
  const bool pushing_low = candidate < g.output_min && error < 0.0;

  ControllerState next = state;
  if (!pushing_high && !pushing_low) next.integral_accumulator += error;
  next.last_output = voltage;
  return {voltage, next};
}

void SimTrace::check() const {
  if (!(dt_ms > 0.0)) throw TraceError("trace dt must be > 0");
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const double expected = static_cast<double>(i) * dt_ms;
    if (std::abs(r.t_ms - expected) > 1e-9 * std::max(1.0, expected)) {
      throw TraceError("trace time column is not uniform at row " + std::to_string(i));
    }
    if (!std::isfinite(r.target_force) || !std::isfinite(r.actual_force) ||
        !std::isfinite(r.voltage) || !std::isfinite(r.displacement)) {
      throw TraceError("non-finite value at row " + std::to_string(i));
    }
  }
}

std::vector<double> SimTrace::actual_forces() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.actual_force);
  return out;
}

double static_force_map(const mechanism::DeviceConfig& dev, double displacement,
                        double voltage_kv) {
  return mechanism::device_static_force(dev, displacement, voltage_kv);
}

SimTrace simulate_step_response(const mechanism::DeviceConfig& dev, const PlantParams& p,
                                double step_voltage, double displacement, double duration_ms,
                                double breakdown_limit) {
  p.validate();
  if (!std::isfinite(step_voltage) || std::abs(step_voltage) > breakdown_limit) {
    throw BreakdownRisk("step voltage exceeds breakdown limit", std::abs(step_voltage));
  }
  const std::size_t n = step_count(duration_ms, p.sample_period);
  const double target = static_force_map(dev, displacement, step_voltage);

  SimTrace trace;
  trace.dt_ms = p.sample_period;
  trace.records.reserve(n + 1);
  double force = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * p.sample_period;
    trace.records.push_back({t, target, force, step_voltage, displacement});
    force = plant_step(p, force, target);
  }
  return trace;
}

double measure_rise_time(const SimTrace& trace) {
  const auto& r = trace.records;
  if (r.size() < 2) throw TraceError("rise time needs at least two samples");
  const double initial = r.front().actual_force;
  const double final_value = r.back().actual_force;
  const double span = final_value - initial;
  if (span == 0.0 || !std::isfinite(span)) throw TraceError("trace has no step to measure");

  // Work on the normalised response so falling steps are handled too. Each
  // crossing is reported with the index of the first sample at or past the level.
  auto norm = [&](std::size_t i) { return (r[i].actual_force - initial) / span; };
  auto crossing = [&](double level) -> std::pair<double, std::size_t> {
    if (norm(0) >= level) return {r[0].t_ms, 0};
    for (std::size_t i = 1; i < r.size(); ++i) {
      const double b = norm(i);
      if (b >= level) {
        const double a = norm(i - 1);
        const double frac = (level - a) / (b - a);
        return {r[i - 1].t_ms + frac * (r[i].t_ms - r[i - 1].t_ms), i};
      }
    }
    throw TraceError("trace never crosses the " + std::to_string(level * 100.0) + "% level");
  };
  const auto [t10, i10] = crossing(0.1);
  const auto [t90, i90] = crossing(0.9);
  // Both levels passed within one sample interval: the edge is not resolved.
  if (i10 == i90) return 0.0;
  return t90 - t10;
}

double TargetWave::value(double t_s) const {
  if (shape == TargetShape::Constant) return offset;
  const double cycles = t_s * frequency;
  const double frac = cycles - std::floor(cycles);
  switch (shape) {
    case TargetShape::Sine:
      return offset + amplitude * std::sin(2.0 * std::numbers::pi * cycles);
    case TargetShape::Square:
      return offset + (frac < 0.5 ? amplitude : -amplitude);
    case TargetShape::Triangle: {
      double tri;
      if (frac < 0.25) {
        tri = 4.0 * frac;
      } else if (frac < 0.75) {
        tri = 2.0 - 4.0 * frac;
      } else {
        tri = 4.0 * frac - 4.0;
      }
      return offset + amplitude * tri;
    }
    case TargetShape::Constant:
      break;
  }
  return offset;
}

double TargetWave::max_value() const {
  return shape == TargetShape::Constant ? offset : offset + std::abs(amplitude);
}

double TargetWave::min_value() const {
  return shape == TargetShape::Constant ? offset : offset - std::abs(amplitude);
}

SimTrace simulate_tracking(const mechanism::DeviceConfig& dev, const PlantParams& p,
                           const PiGains& g, const TargetWave& target, double displacement,
                           double duration_ms) {
  p.validate();
  g.validate();
  if (target.shape != TargetShape::Constant && !(target.frequency > 0.0)) {
    throw ValidationError("target.frequency", "must be > 0");
  }
  const double capability = static_force_map(dev, displacement, g.output_max);
  if (target.max_value() > capability) {
    throw CapabilityError("target peak " + std::to_string(target.max_value()) +
                          " N exceeds device capability " + std::to_string(capability) +
                          " N at " + std::to_string(g.output_max) + " kV");
  }
  if (target.min_value() < 0.0) {
    throw CapabilityError("target goes below 0 N; the actuators only push");
  }

  const std::size_t n = step_count(duration_ms, p.sample_period);
  SimTrace trace;
  trace.dt_ms = p.sample_period;
  trace.records.reserve(n + 1);
  ControllerState state;
  double force = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * p.sample_period;
    const double goal = target.value(t * 1e-3);
    const auto [voltage, next] = pi_step(g, state, goal - force);
    state = next;
    trace.records.push_back({t, goal, force, voltage, displacement});
    force = plant_step(p, force, static_force_map(dev, displacement, voltage));
  }
  return trace;
}

SimTrace simulate_vibration(const mechanism::DeviceConfig& dev, const PlantParams& p,
                            const waveform::CompositeWaveform& w, double displacement,
                            double duration_ms) {
  p.validate();
  waveform::validate_waveform(w);
  // u^2 enters the static map, so one gain per displacement suffices.
  const double gain = static_force_map(dev, displacement, 1.0);

  const std::size_t n = step_count(duration_ms, p.sample_period);
  SimTrace trace;
  trace.dt_ms = p.sample_period;
  trace.records.reserve(n + 1);
  double force = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * p.sample_period;
    const double u = waveform::sample_voltage(w, t * 1e-3);
    const double static_force = gain * u * u;
    trace.records.push_back({t, static_force, force, u, displacement});
    force = plant_step(p, force, static_force);
  }
  return trace;
}

double rms_tracking_error(const SimTrace& trace, double from_ms) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& r : trace.records) {
    if (r.t_ms < from_ms) continue;
    const double e = r.target_force - r.actual_force;
    sum += e * e;
    ++count;
  }
  if (count == 0) throw TraceError("no samples after " + std::to_string(from_ms) + " ms");
  return std::sqrt(sum / static_cast<double>(count));
}

std::vector<EdgeSettling> edge_settling_times(const SimTrace& trace, double tolerance) {
  const auto& r = trace.records;
  std::vector<std::size_t> edges;
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (r[i].target_force != r[i - 1].target_force) edges.push_back(i);
  }
  std::vector<EdgeSettling> out;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const std::size_t begin = edges[e];
    const std::size_t end = e + 1 < edges.size() ? edges[e + 1] : r.size();
    const double level = r[begin].target_force;
    const double step = level - r[begin - 1].target_force;
    const double band = tolerance * std::abs(step);

    std::size_t last_outside = begin;
    bool any_outside = false;
    for (std::size_t i = begin; i < end; ++i) {
      if (std::abs(r[i].actual_force - level) > band) {
        last_outside = i;
        any_outside = true;
      }
    }
    EdgeSettling s;
    s.edge_ms = r[begin].t_ms;
    s.rising = step > 0.0;
    s.step = step;
    s.settled = !any_outside || last_outside + 1 < end;
    s.settle_ms = any_outside ? r[last_outside].t_ms + trace.dt_ms - s.edge_ms : 0.0;
    out.push_back(s);
  }
  return out;
}

}  // namespace ehsim::dynamics
