#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <span>
#include <vector>

namespace ehsim::teleop {

struct ChannelModel {
  double base_latency_ms = 0.0;
  double jitter_ms = 0.0;  // uniform in [0, jitter]

  void validate() const;
};

// In-process reliable ordered byte pipe with simulated latency. Delivery time
// of a chunk is never earlier than the one sent before it.
class DelayChannel {
 public:
  DelayChannel(ChannelModel model, std::uint64_t seed);

  void send(std::uint64_t now_us, std::span<const std::uint8_t> bytes);
  /// All bytes whose delivery time is <= now, in send order.
  std::vector<std::uint8_t> receive(std::uint64_t now_us);
  std::size_t in_flight() const { return queue_.size(); }

 private:
  struct Packet {
    std::uint64_t deliver_us;
    std::vector<std::uint8_t> bytes;
  };

  ChannelModel model_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> jitter_;
  std::deque<Packet> queue_;
  std::uint64_t last_deliver_us_ = 0;
};

}  // namespace ehsim::teleop
