#include "ehsim/teleop/frame.hpp"

#include <bit>
#include <cmath>
#include <cstring>

namespace ehsim::teleop {

namespace {

template <typename T>
void put_le(std::uint8_t* out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out[i] = static_cast<std::uint8_t>(value >> (8 * i));
  }
}

template <typename T>
T get_le(const std::uint8_t* in) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<T>(in[i]) << (8 * i));
  }
  return value;
}

}  // namespace

bool is_valid_msg_type(std::uint8_t raw) { return raw >= 0x01 && raw <= 0x04; }

const char* to_string(FrameErrorCode code) {
  switch (code) {
    case FrameErrorCode::BadLength:
      return "bad-length";
    case FrameErrorCode::BadMagic:
      return "bad-magic";
    case FrameErrorCode::BadType:
      return "bad-type";
    case FrameErrorCode::NonFinitePayload:
      return "non-finite-payload";
  }
  return "unknown";
}

FrameBytes encode_frame(const TeleopFrame& f) {
  const auto raw_type = static_cast<std::uint8_t>(f.msg_type);
  if (!is_valid_msg_type(raw_type)) {
    throw FrameError(FrameErrorCode::BadType, "cannot encode msg_type " + std::to_string(raw_type));
  }
  if (!std::isfinite(f.payload_a) || !std::isfinite(f.payload_b)) {
    throw FrameError(FrameErrorCode::NonFinitePayload, "cannot encode non-finite payload");
  }
  FrameBytes out{};
  out[0] = kFrameMagic;
  out[1] = raw_type;
  put_le<std::uint16_t>(&out[2], f.seq);
  put_le<std::uint64_t>(&out[4], f.timestamp_us);
  put_le<std::uint64_t>(&out[12], std::bit_cast<std::uint64_t>(f.payload_a));
  put_le<std::uint64_t>(&out[20], std::bit_cast<std::uint64_t>(f.payload_b));
  return out;
}

TeleopFrame decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kFrameSize) {
    throw FrameError(FrameErrorCode::BadLength,
                     "frame must be 28 bytes, got " + std::to_string(bytes.size()));
  }
  if (bytes[0] != kFrameMagic) {
    throw FrameError(FrameErrorCode::BadMagic, "bad magic byte " + std::to_string(bytes[0]));
  }
  if (!is_valid_msg_type(bytes[1])) {
    throw FrameError(FrameErrorCode::BadType, "unknown msg_type " + std::to_string(bytes[1]));
  }
  TeleopFrame f;
  f.msg_type = static_cast<MsgType>(bytes[1]);
  f.seq = get_le<std::uint16_t>(&bytes[2]);
  f.timestamp_us = get_le<std::uint64_t>(&bytes[4]);
  f.payload_a = std::bit_cast<double>(get_le<std::uint64_t>(&bytes[12]));
  f.payload_b = std::bit_cast<double>(get_le<std::uint64_t>(&bytes[20]));
  if (!std::isfinite(f.payload_a) || !std::isfinite(f.payload_b)) {
    throw FrameError(FrameErrorCode::NonFinitePayload, "frame carries a non-finite payload");
  }
  return f;
}

void FrameReader::feed(std::span<const std::uint8_t> bytes) {
  buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
}

std::optional<TeleopFrame> FrameReader::next() {
  if (buffer_.size() < kFrameSize) return std::nullopt;
  FrameBytes chunk;
  std::memcpy(chunk.data(), buffer_.data(), kFrameSize);
  buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(kFrameSize));
  return decode_frame(chunk);
}

}  // namespace ehsim::teleop
