#include "ehsim/teleop/socket_transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <thread>
#include <utility>

#include "ehsim/error.hpp"

namespace ehsim::teleop {

namespace {

[[noreturn]] void throw_errno(const std::string& what) {
  throw Error(what + ": " + std::strerror(errno));
}

sockaddr_in to_sockaddr(const Endpoint& ep) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(ep.port);
  if (inet_pton(AF_INET, ep.host.c_str(), &addr.sin_addr) != 1) {
    throw ValidationError("endpoint", "not an IPv4 address: " + ep.host);
  }
  return addr;
}

std::vector<TeleopFrame> read_frames(FrameReader& reader, TcpStream& stream) {
  const auto bytes = stream.read_available();
  reader.feed(bytes);
  std::vector<TeleopFrame> frames;
  while (auto f = reader.next()) frames.push_back(*f);
  return frames;
}

void write_frames(TcpStream& stream, std::span<const TeleopFrame> frames) {
  for (const auto& f : frames) stream.write_all(encode_frame(f));
}

// Wall-clock tick source; unpaced runs step as fast as the peer allows.
class TickClock {
 public:
  explicit TickClock(bool paced) : paced_(paced), start_(std::chrono::steady_clock::now()) {}

  std::uint64_t wait_for_tick(std::size_t k) {
    const auto due = start_ + std::chrono::microseconds(k * 1000);
    if (paced_) std::this_thread::sleep_until(due);
    const auto now = std::chrono::steady_clock::now();
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::microseconds>(now - start_).count());
  }

 private:
  bool paced_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

Endpoint parse_endpoint(const std::string& text) {
  Endpoint ep;
  std::string port_text = text;
  if (const auto colon = text.rfind(':'); colon != std::string::npos) {
    if (colon > 0) ep.host = text.substr(0, colon);
    port_text = text.substr(colon + 1);
  }
  try {
    std::size_t used = 0;
    const long port = std::stol(port_text, &used);
    if (used != port_text.size() || port < 0 || port > 65535) throw std::out_of_range("port");
    ep.port = static_cast<std::uint16_t>(port);
  } catch (const std::exception&) {
    throw ValidationError("endpoint", "bad port in '" + text + "'");
  }
  return ep;
}

TcpStream::TcpStream(int fd) : fd_(fd) {
  const int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

TcpStream::TcpStream(TcpStream&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)), peer_closed_(other.peer_closed_) {}

TcpStream& TcpStream::operator=(TcpStream&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = std::exchange(other.fd_, -1);
    peer_closed_ = other.peer_closed_;
  }
  return *this;
}

TcpStream::~TcpStream() {
  if (fd_ >= 0) ::close(fd_);
}

int TcpStream::open_listener(const Endpoint& at) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw_errno("socket");
  const int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  const auto addr = to_sockaddr(at);
  if (::bind(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd);
    throw_errno("bind");
  }
  if (::listen(fd, 1) != 0) {
    ::close(fd);
    throw_errno("listen");
  }
  return fd;
}

std::uint16_t TcpStream::bound_port(int fd) {
  sockaddr_in addr{};
  socklen_t len = sizeof(addr);
  if (::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) != 0) throw_errno("getsockname");
  return ntohs(addr.sin_port);
}

int TcpStream::accept_and_close(int listener) {
  const int fd = ::accept(listener, nullptr, nullptr);
  ::close(listener);
  if (fd < 0) throw_errno("accept");
  return fd;
}

TcpStream TcpStream::connect(const Endpoint& to, std::chrono::milliseconds timeout) {
  const auto addr = to_sockaddr(to);
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (true) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw_errno("socket");
    if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) == 0) {
      return TcpStream(fd);
    }
    ::close(fd);
    if (std::chrono::steady_clock::now() >= deadline) throw_errno("connect");
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
}

void TcpStream::write_all(std::span<const std::uint8_t> bytes) {
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const auto n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw_errno("send");
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::vector<std::uint8_t> TcpStream::read_available() {
  std::vector<std::uint8_t> out;
  std::uint8_t buf[4096];
  while (true) {
    const auto n = ::recv(fd_, buf, sizeof(buf), MSG_DONTWAIT);
    if (n > 0) {
      out.insert(out.end(), buf, buf + n);
      continue;
    }
    if (n == 0) {
      peer_closed_ = true;
      break;
    }
    if (errno == EINTR) continue;
    if (errno == EAGAIN || errno == EWOULDBLOCK) break;
    throw_errno("recv");
  }
  return out;
}

SessionTrace run_master_live(const SessionConfig& config, TcpStream& stream,
                             const LiveOptions& options) {
  config.validate();
  MasterEndpoint master(config.device, config.master);
  FrameReader reader;
  TickClock clock(options.paced);
  const auto ticks = static_cast<std::size_t>(std::llround(options.duration_ms));

  SessionTrace trace;
  for (std::size_t k = 0; k <= ticks; ++k) {
    const auto now_us = clock.wait_for_tick(k);
    const double t_ms = static_cast<double>(k);
    try {
      const double pinch = config.profile.at(t_ms);
      const auto inbound = read_frames(reader, stream);
      const auto m = master.tick(now_us, pinch, inbound);
      write_frames(stream, m.frames);
      trace.records.push_back({t_ms, m.target_force, m.local_force, m.voltage, pinch,
                               master.slave_force(), master.slave_position(),
                               master.last_latency_ms()});
    } catch (const Error& e) {
      throw SessionError(k, e.what());
    }
    if (master.state() == LinkState::Closed || stream.peer_closed()) break;
  }
  if (!stream.peer_closed()) {
    const auto bye = master.shutdown_frame(clock.wait_for_tick(0));
    stream.write_all(encode_frame(bye));
  }
  return trace;
}

SessionTrace run_slave_live(const SessionConfig& config, TcpStream& stream,
                            const LiveOptions& options) {
  config.validate();
  SlaveEndpoint slave(config.slave, config.object, 1.0);
  FrameReader reader;
  TickClock clock(options.paced);
  const auto ticks = static_cast<std::size_t>(std::llround(options.duration_ms));

  SessionTrace trace;
  for (std::size_t k = 0; k <= ticks; ++k) {
    const auto now_us = clock.wait_for_tick(k);
    const double t_ms = static_cast<double>(k);
    try {
      const auto inbound = read_frames(reader, stream);
      const auto out = slave.tick(now_us, inbound);
      if (slave.state() != LinkState::Closed) write_frames(stream, out);
      trace.records.push_back({t_ms, 0.0, slave.master_force(), 0.0, slave.commanded(),
                               slave.force(), slave.position(), slave.last_latency_ms()});
    } catch (const Error& e) {
      throw SessionError(k, e.what());
    }
    if (slave.state() == LinkState::Closed || stream.peer_closed()) break;
  }
  return trace;
}

}  // namespace ehsim::teleop
