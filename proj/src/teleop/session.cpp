#include "ehsim/teleop/session.hpp"

#include <cmath>

#include "ehsim/teleop/frame.hpp"

namespace ehsim::teleop {

namespace {

constexpr double kTickMs = 1.0;

std::vector<TeleopFrame> read_frames(FrameReader& reader, std::span<const std::uint8_t> bytes) {
  reader.feed(bytes);
  std::vector<TeleopFrame> frames;
  while (auto f = reader.next()) frames.push_back(*f);
  return frames;
}

void send_frames(DelayChannel& channel, std::uint64_t now_us,
                 std::span<const TeleopFrame> frames) {
  for (const auto& f : frames) {
    const auto bytes = encode_frame(f);
    channel.send(now_us, bytes);
  }
}

}  // namespace

void OperatorProfile::validate() const {
  if (keyframes.empty()) throw ValidationError("profile", "needs at least one keyframe");
  for (std::size_t i = 0; i < keyframes.size(); ++i) {
    const auto [t, x] = keyframes[i];
    if (!std::isfinite(t) || !std::isfinite(x) || x < 0.0) {
      throw ValidationError("profile", "keyframes must be finite with displacement >= 0");
    }
    if (i > 0 && t <= keyframes[i - 1].first) {
      throw ValidationError("profile", "keyframe times must increase strictly");
    }
  }
}

double OperatorProfile::at(double t_ms) const {
  if (t_ms <= keyframes.front().first) return keyframes.front().second;
  for (std::size_t i = 1; i < keyframes.size(); ++i) {
    const auto [t1, x1] = keyframes[i];
    if (t_ms <= t1) {
      const auto [t0, x0] = keyframes[i - 1];
      return x0 + (x1 - x0) * (t_ms - t0) / (t1 - t0);
    }
  }
  return keyframes.back().second;
}

void SessionConfig::validate() const {
  device.validate();
  master.validate();
  slave.validate();
  object.validate();
  channel.validate();
  profile.validate();
}

dynamics::SimTrace SessionTrace::master_trace() const {
  dynamics::SimTrace t;
  t.dt_ms = dt_ms;
  for (const auto& r : records) {
    t.records.push_back({r.t_ms, r.target_force, r.master_force, r.voltage, r.master_position});
  }
  return t;
}

dynamics::SimTrace SessionTrace::slave_trace() const {
  dynamics::SimTrace t;
  t.dt_ms = dt_ms;
  for (const auto& r : records) {
    t.records.push_back({r.t_ms, r.slave_force, r.slave_force, 0.0, r.slave_position});
  }
  return t;
}

SessionTrace run_session(const SessionConfig& config, double duration_ms) {
  config.validate();
  if (!(std::isfinite(duration_ms) && duration_ms >= 0.0)) {
    throw ValidationError("duration", "must be >= 0");
  }

  MasterEndpoint master(config.device, config.master);
  SlaveEndpoint slave(config.slave, config.object, kTickMs);
  // Independent jitter streams per direction, both derived from the session seed.
  DelayChannel to_slave(config.channel, config.seed);
  DelayChannel to_master(config.channel, config.seed ^ 0x9E3779B97F4A7C15ULL);
  FrameReader master_reader;
  FrameReader slave_reader;

  const auto ticks = static_cast<std::size_t>(std::llround(duration_ms / kTickMs));
  SessionTrace trace;
  trace.dt_ms = kTickMs;
  trace.records.reserve(ticks + 1);

  for (std::size_t k = 0; k <= ticks; ++k) {
    const double t_ms = static_cast<double>(k) * kTickMs;
    const auto now_us = static_cast<std::uint64_t>(k) * 1000U;
    try {
      const double pinch = config.profile.at(t_ms);
      const auto master_in = read_frames(master_reader, to_master.receive(now_us));
      const auto m = master.tick(now_us, pinch, master_in);
      send_frames(to_slave, now_us, m.frames);

      const auto slave_in = read_frames(slave_reader, to_slave.receive(now_us));
      const auto s = slave.tick(now_us, slave_in);
      send_frames(to_master, now_us, s);

      trace.records.push_back({t_ms, m.target_force, m.local_force, m.voltage, pinch,
                               slave.force(), slave.position(), master.last_latency_ms()});
    } catch (const Error& e) {
      throw SessionError(k, e.what());
    }
  }
  const auto bye = encode_frame(master.shutdown_frame(static_cast<std::uint64_t>(ticks) * 1000U));
  to_slave.send(static_cast<std::uint64_t>(ticks) * 1000U, bye);
  return trace;
}

}  // namespace ehsim::teleop
