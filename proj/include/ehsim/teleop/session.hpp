#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ehsim/dynamics.hpp"
#include "ehsim/teleop/channel.hpp"
#include "ehsim/teleop/endpoints.hpp"

namespace ehsim::teleop {

// Scripted operator pinch: piecewise-linear keyframes (t ms, displacement mm),
// held constant after the last one.
struct OperatorProfile {
  std::vector<std::pair<double, double>> keyframes{{0.0, 0.0}, {1000.0, 3.5}};

  void validate() const;
  double at(double t_ms) const;
};

struct SessionConfig {
  mechanism::DeviceConfig device;
  MasterParams master;
  SlaveParams slave;
  VirtualObject object;
  ChannelModel channel;
  OperatorProfile profile;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SessionRecord {
  double t_ms;
  double target_force;      // master PI target, N
  double master_force;      // master load cell, N
  double voltage;           // kV
  double master_position;   // pinch displacement, mm
  double slave_force;       // N
  double slave_position;    // mm
  double latency_ms;        // age of the last SLAVE_STATE seen by the master
};

struct SessionTrace {
  double dt_ms = 1.0;
  std::vector<SessionRecord> records;

  dynamics::SimTrace master_trace() const;
  dynamics::SimTrace slave_trace() const;
};

class SessionError : public Error {
 public:
  SessionError(std::size_t tick, const std::string& what)
      : Error("tick " + std::to_string(tick) + ": " + what), tick_(tick) {}
  std::size_t tick() const { return tick_; }

 private:
  std::size_t tick_;
};

/// Deterministic single-threaded interleaving of master and slave at 1 kHz:
/// each tick the master runs first, then the slave, each reading whatever the
/// channels have delivered by that instant.
SessionTrace run_session(const SessionConfig& config, double duration_ms);

}  // namespace ehsim::teleop
