#include "ehsim/teleop/endpoints.hpp"

#include <algorithm>
#include <cmath>

#include "ehsim/error.hpp"

namespace ehsim::teleop {

void VirtualObject::validate() const {
  if (!std::isfinite(contact_position)) throw ValidationError("contact_position", "must be finite");
  if (!(std::isfinite(linear_stiffness) && linear_stiffness >= 0.0)) {
    throw ValidationError("linear_stiffness", "must be >= 0");
  }
  if (!(std::isfinite(cubic_stiffness) && cubic_stiffness >= 0.0)) {
    throw ValidationError("cubic_stiffness", "must be >= 0");
  }
}

double VirtualObject::force(double position_mm) const {
  if (position_mm <= contact_position) return 0.0;
  const double d = position_mm - contact_position;
  return linear_stiffness * d + cubic_stiffness * d * d * d;
}

void SlaveParams::validate() const {
  if (!(std::isfinite(max_speed) && max_speed > 0.0)) throw ValidationError("max_speed", "must be > 0");
  if (!(std::isfinite(position_step) && position_step > 0.0)) {
    throw ValidationError("position_step", "must be > 0");
  }
  if (!(std::isfinite(contact_threshold) && contact_threshold > 0.0)) {
    throw ValidationError("contact_threshold", "must be > 0");
  }
}

void MasterParams::validate() const {
  gains.validate();
  plant.validate();
  if (!(std::isfinite(contact_threshold) && contact_threshold > 0.0)) {
    throw ValidationError("contact_threshold", "must be > 0");
  }
  if (!(std::isfinite(stale_timeout_ms) && stale_timeout_ms > 0.0)) {
    throw ValidationError("stale_timeout", "must be > 0");
  }
}

MasterEndpoint::MasterEndpoint(mechanism::DeviceConfig device, MasterParams params)
    : device_(std::move(device)), params_(params) {
  device_.validate();
  params_.validate();
}

TeleopFrame MasterEndpoint::make_frame(MsgType type, std::uint64_t now_us, double a, double b) {
  return TeleopFrame{type, seq_++, now_us, a, b};
}

TeleopFrame MasterEndpoint::shutdown_frame(std::uint64_t now_us) {
  state_ = LinkState::Closed;
  return make_frame(MsgType::Shutdown, now_us, 0.0, 0.0);
}

MasterEndpoint::Output MasterEndpoint::tick(std::uint64_t now_us, double pinch_mm,
                                            std::span<const TeleopFrame> inbound) {
  Output out;
  out.local_force = local_force_;

  bool fresh_state = false;
  for (const auto& f : inbound) {
    switch (f.msg_type) {
      case MsgType::Hello:
        if (state_ == LinkState::AwaitingHello) {
          state_ = LinkState::Active;
          last_slave_us_ = now_us;
        }
        break;
      case MsgType::SlaveState:
        slave_position_ = f.payload_a;
        slave_force_ = f.payload_b;
        last_slave_us_ = now_us;
        last_latency_ms_ = now_us >= f.timestamp_us
                               ? static_cast<double>(now_us - f.timestamp_us) * 1e-3
                               : 0.0;
        fresh_state = true;
        break;
      case MsgType::Shutdown:
        state_ = LinkState::Closed;
        break;
      case MsgType::MasterPos:
        break;
    }
  }

  if (!hello_sent_) {
    out.frames.push_back(make_frame(MsgType::Hello, now_us, 0.0, 0.0));
    hello_sent_ = true;
  }

  double voltage = 0.0;
  if (state_ == LinkState::Active) {
    out.frames.push_back(make_frame(MsgType::MasterPos, now_us, pinch_mm, local_force_));

    const double since_ms = static_cast<double>(now_us - last_slave_us_) * 1e-3;
    stale_ = !fresh_state && since_ms > params_.stale_timeout_ms;
    if (!stale_) {
      in_contact_ = slave_force_ > params_.contact_threshold;
      target_ = in_contact_ ? slave_force_ : 0.0;
    }
    const auto pi = dynamics::pi_step(params_.gains, controller_, target_ - local_force_);
    controller_ = pi.state;
    voltage = pi.voltage;
  }

  const double static_force = dynamics::static_force_map(device_, pinch_mm, voltage);
  local_force_ = dynamics::plant_step(params_.plant, local_force_, static_force);

  out.voltage = voltage;
  out.target_force = target_;
  return out;
}

SlaveEndpoint::SlaveEndpoint(SlaveParams params, VirtualObject object, double dt_ms)
    : params_(params), object_(std::move(object)), dt_ms_(dt_ms) {
  params_.validate();
  object_.validate();
  if (!(dt_ms_ > 0.0)) throw ValidationError("dt", "must be > 0");
}

std::vector<TeleopFrame> SlaveEndpoint::tick(std::uint64_t now_us,
                                             std::span<const TeleopFrame> inbound) {
  for (const auto& f : inbound) {
    switch (f.msg_type) {
      case MsgType::Hello:
        if (state_ == LinkState::AwaitingHello) state_ = LinkState::Active;
        break;
      case MsgType::MasterPos:
        commanded_ = f.payload_a;
        master_force_ = f.payload_b;
        last_latency_ms_ = now_us >= f.timestamp_us
                               ? static_cast<double>(now_us - f.timestamp_us) * 1e-3
                               : 0.0;
        break;
      case MsgType::Shutdown:
        state_ = LinkState::Closed;
        break;
      case MsgType::SlaveState:
        break;
    }
  }

  std::vector<TeleopFrame> out;
  if (!hello_sent_) {
    out.push_back({MsgType::Hello, seq_++, now_us, 0.0, 0.0});
    hello_sent_ = true;
  }

  const double step = params_.position_step;
  const double goal = std::round(commanded_ / step) * step;
  const double max_move = params_.max_speed * dt_ms_ * 1e-3;
  servo_position_ += std::clamp(goal - servo_position_, -max_move, max_move);
  reported_position_ = std::round(servo_position_ / step) * step;
  force_ = object_.force(reported_position_);

  if (state_ == LinkState::Active) {
    out.push_back({MsgType::SlaveState, seq_++, now_us, reported_position_, force_});
  }
  return out;
}

}  // namespace ehsim::teleop
