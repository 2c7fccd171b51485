#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ehsim/dynamics.hpp"
#include "ehsim/mechanism.hpp"
#include "ehsim/teleop/frame.hpp"

namespace ehsim::teleop {

// Grasped object: no force until contact, then k·δ + k3·δ^3.
struct VirtualObject {
  double contact_position = 0.5;  // mm
  double linear_stiffness = 0.3;  // N/mm
  double cubic_stiffness = 0.0;   // N/mm^3
  std::string label = "spring";

  void validate() const;
  double force(double position_mm) const;
};

struct SlaveParams {
  double max_speed = 30.0;         // mm/s
  double position_step = 0.01;     // mm
  double contact_threshold = 0.02; // N

  void validate() const;
};

struct MasterParams {
  dynamics::PiGains gains;
  dynamics::PlantParams plant;
  double contact_threshold = 0.02;  // N; slave force above this switches on reflection
  double stale_timeout_ms = 100.0;

  void validate() const;
};

enum class LinkState { AwaitingHello, Active, Closed };

// Haptic-device side. Streams its pinch displacement every tick once the
// session is up and renders the slave's contact force through the PI loop.
class MasterEndpoint {
 public:
  MasterEndpoint(mechanism::DeviceConfig device, MasterParams params);

  struct Output {
    std::vector<TeleopFrame> frames;
    double voltage = 0.0;       // kV applied during this tick
    double local_force = 0.0;   // N, load cell at the start of the tick
    double target_force = 0.0;  // N
  };

  Output tick(std::uint64_t now_us, double pinch_mm, std::span<const TeleopFrame> inbound);
  TeleopFrame shutdown_frame(std::uint64_t now_us);

  LinkState state() const { return state_; }
  double local_force() const { return local_force_; }
  double slave_force() const { return slave_force_; }
  double slave_position() const { return slave_position_; }
  double last_latency_ms() const { return last_latency_ms_; }
  bool stale() const { return stale_; }
  bool in_contact() const { return in_contact_; }

 private:
  TeleopFrame make_frame(MsgType type, std::uint64_t now_us, double a, double b);

  mechanism::DeviceConfig device_;
  MasterParams params_;
  LinkState state_ = LinkState::AwaitingHello;
  bool hello_sent_ = false;
  std::uint16_t seq_ = 0;
  dynamics::ControllerState controller_;
  double local_force_ = 0.0;
  double target_ = 0.0;
  double slave_force_ = 0.0;
  double slave_position_ = 0.0;
  double last_latency_ms_ = 0.0;
  std::uint64_t last_slave_us_ = 0;
  bool stale_ = false;
  bool in_contact_ = false;
};

// Gripper side: rate-limited position servo plus load cell on a virtual object.
class SlaveEndpoint {
 public:
  SlaveEndpoint(SlaveParams params, VirtualObject object, double dt_ms = 1.0);

  std::vector<TeleopFrame> tick(std::uint64_t now_us, std::span<const TeleopFrame> inbound);

  LinkState state() const { return state_; }
  double position() const { return reported_position_; }
  double force() const { return force_; }
  double commanded() const { return commanded_; }
  double master_force() const { return master_force_; }
  double last_latency_ms() const { return last_latency_ms_; }

 private:
  SlaveParams params_;
  VirtualObject object_;
  double dt_ms_;
  LinkState state_ = LinkState::AwaitingHello;
  bool hello_sent_ = false;
  std::uint16_t seq_ = 0;
  double commanded_ = 0.0;
  double servo_position_ = 0.0;
  double reported_position_ = 0.0;
  double force_ = 0.0;
  double master_force_ = 0.0;
  double last_latency_ms_ = 0.0;
};

}  // namespace ehsim::teleop
