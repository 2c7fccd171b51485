#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ehsim/error.hpp"

namespace ehsim::teleop {

// Fixed 28-byte little-endian frame:
//   [0]      magic 0xA7
//   [1]      msg_type
//   [2..3]   seq          u16
//   [4..11]  timestamp_us u64
//   [12..19] payload_a    f64
//   [20..27] payload_b    f64
inline constexpr std::size_t kFrameSize = 28;
inline constexpr std::uint8_t kFrameMagic = 0xA7;

enum class MsgType : std::uint8_t {
  MasterPos = 0x01,   // a: pinch displacement mm, b: master local force N
  SlaveState = 0x02,  // a: gripper displacement mm, b: gripper load-cell force N
  Hello = 0x03,
  Shutdown = 0x04,
};

bool is_valid_msg_type(std::uint8_t raw);

struct TeleopFrame {
  MsgType msg_type = MsgType::Hello;
  std::uint16_t seq = 0;
  std::uint64_t timestamp_us = 0;
  double payload_a = 0.0;
  double payload_b = 0.0;

  friend bool operator==(const TeleopFrame&, const TeleopFrame&) = default;
};

using FrameBytes = std::array<std::uint8_t, kFrameSize>;

enum class FrameErrorCode {
  BadLength,
  BadMagic,
  BadType,
  NonFinitePayload,
};

const char* to_string(FrameErrorCode code);

class FrameError : public Error {
 public:
  FrameError(FrameErrorCode code, const std::string& what) : Error(what), code_(code) {}
  FrameErrorCode code() const { return code_; }

 private:
  FrameErrorCode code_;
};

FrameBytes encode_frame(const TeleopFrame& f);
TeleopFrame decode_frame(std::span<const std::uint8_t> bytes);

// Splits a contiguous byte stream into frames; partial tails are kept until
// the rest arrives.
class FrameReader {
 public:
  void feed(std::span<const std::uint8_t> bytes);
  /// Next complete frame, or nullopt if fewer than 28 bytes are buffered.
  /// A malformed frame is consumed and reported as FrameError.
  std::optional<TeleopFrame> next();
  std::size_t buffered() const { return buffer_.size(); }

 private:
  std::vector<std::uint8_t> buffer_;
};

}  // namespace ehsim::teleop
