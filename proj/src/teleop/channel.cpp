#include "ehsim/teleop/channel.hpp"

#include <algorithm>
#include <cmath>

#include "ehsim/error.hpp"

namespace ehsim::teleop {

void ChannelModel::validate() const {
  if (!(std::isfinite(base_latency_ms) && base_latency_ms >= 0.0)) {
    throw ValidationError("base_latency", "must be >= 0");
  }
  if (!(std::isfinite(jitter_ms) && jitter_ms >= 0.0)) {
    throw ValidationError("jitter", "must be >= 0");
  }
}

DelayChannel::DelayChannel(ChannelModel model, std::uint64_t seed)
    : model_(model), rng_(seed), jitter_(0.0, 1.0) {
  model_.validate();
}

void DelayChannel::send(std::uint64_t now_us, std::span<const std::uint8_t> bytes) {
  double delay_ms = model_.base_latency_ms;
  if (model_.jitter_ms > 0.0) delay_ms += model_.jitter_ms * jitter_(rng_);
  const auto delay_us = static_cast<std::uint64_t>(std::llround(delay_ms * 1e3));
  const std::uint64_t deliver = std::max(now_us + delay_us, last_deliver_us_);
  last_deliver_us_ = deliver;
  queue_.push_back({deliver, {bytes.begin(), bytes.end()}});
}

std::vector<std::uint8_t> DelayChannel::receive(std::uint64_t now_us) {
  std::vector<std::uint8_t> out;
  while (!queue_.empty() && queue_.front().deliver_us <= now_us) {
    const auto& p = queue_.front().bytes;
    out.insert(out.end(), p.begin(), p.end());
    queue_.pop_front();
  }
  return out;
}

}  // namespace ehsim::teleop
