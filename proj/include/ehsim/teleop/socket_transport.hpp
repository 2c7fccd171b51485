#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ehsim/teleop/session.hpp"

namespace ehsim::teleop {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
};

/// Parses "host:port" or ":port" / "port" (host defaults to 127.0.0.1).
Endpoint parse_endpoint(const std::string& text);

// Blocking-connect, non-blocking-read TCP byte stream. Move-only.
class TcpStream {
 public:
  /// Binds, accepts exactly one peer and closes the listening socket.
  /// on_listening receives the bound port (useful when port 0 was requested).
  template <typename OnListening>
  static TcpStream accept_one(const Endpoint& at, OnListening on_listening) {
    const int listener = open_listener(at);
    on_listening(bound_port(listener));
    return TcpStream(accept_and_close(listener));
  }
  static TcpStream accept_one(const Endpoint& at) {
    return accept_one(at, [](std::uint16_t) {});
  }
  static TcpStream connect(const Endpoint& to, std::chrono::milliseconds timeout);

  TcpStream(TcpStream&& other) noexcept;
  TcpStream& operator=(TcpStream&& other) noexcept;
  TcpStream(const TcpStream&) = delete;
  TcpStream& operator=(const TcpStream&) = delete;
  ~TcpStream();

  void write_all(std::span<const std::uint8_t> bytes);
  std::vector<std::uint8_t> read_available();
  bool peer_closed() const { return peer_closed_; }

 private:
  explicit TcpStream(int fd);
  static int open_listener(const Endpoint& at);
  static std::uint16_t bound_port(int fd);
  static int accept_and_close(int listener);

  int fd_ = -1;
  bool peer_closed_ = false;
};

struct LiveOptions {
  double duration_ms = 5000.0;
  bool paced = true;  // sleep to hold 1 kHz wall-clock ticks
};

/// Runs the master state machine against a connected stream. Rows hold the
/// master's view; slave columns come from the latest SLAVE_STATE.
SessionTrace run_master_live(const SessionConfig& config, TcpStream& stream,
                             const LiveOptions& options);

/// Runs the slave until SHUTDOWN arrives, the peer closes or the duration ends.
/// Master columns come from the latest MASTER_POS.
SessionTrace run_slave_live(const SessionConfig& config, TcpStream& stream,
                            const LiveOptions& options);

}  // namespace ehsim::teleop
