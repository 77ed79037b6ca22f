// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <arpa/inet.h>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <optional>
#include <poll.h>
#include <string>
#include <string_view>
#include <sys/socket.h>
#include <sys/types.h>
#include <unistd.h>
#include <utility>

#include "wdvdb/error.hpp"
#include "wdvdb/util/text.hpp"

namespace wdvdb::net {

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() { reset(); }

  int get() const noexcept { return fd_; }
  bool valid() const noexcept { return fd_ >= 0; }
  void reset() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

struct Address {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  std::string str() const { return host + ":" + std::to_string(port); }
};

/// "host:port"; a bare port means 127.0.0.1.
inline Address parse_address(std::string_view s) {
  Address a;
  const auto colon = s.rfind(':');
  std::string_view port = s;
  if (colon != std::string_view::npos) {
    a.host = std::string(s.substr(0, colon));
    port = s.substr(colon + 1);
  }
  if (a.host.empty()) a.host = "127.0.0.1";
  const auto p = text::parse_int<int>(port);
  if (!p || *p < 0 || *p > 65535) fail(ErrorCode::Usage, "bad address '" + std::string(s) + "' (expected host:port)");
  a.port = static_cast<std::uint16_t>(*p);
  return a;
}

namespace detail {

inline sockaddr_in resolve(const Address& a) {
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons(a.port);
  const std::string host = a.host == "localhost" ? "127.0.0.1" : a.host;
  if (inet_pton(AF_INET, host.c_str(), &sa.sin_addr) == 1) return sa;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || !res)
    fail(ErrorCode::ConnectionRefused, "cannot resolve host " + a.host);
  sa.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
  freeaddrinfo(res);
  return sa;
}

inline std::string errno_text() { return std::strerror(errno); }

}  // namespace detail

/// Buffered, newline-framed byte stream over a connected socket.
class Connection {
 public:
  using Millis = std::chrono::milliseconds;

  Connection() = default;
  explicit Connection(Fd fd) : fd_(std::move(fd)) {
    const int one = 1;
    ::setsockopt(fd_.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }

  bool open() const noexcept { return fd_.valid(); }
  void close() noexcept { fd_.reset(); }
  /// Unblocks a reader in another thread; the descriptor stays owned.
  void shutdown() noexcept {
    if (fd_.valid()) ::shutdown(fd_.get(), SHUT_RDWR);
  }

  /// Queues bytes; they go out on flush() or once the buffer is large.
  void write(std::string_view bytes) {
    out_.append(bytes);
    if (out_.size() >= 1 << 16) flush();
  }

  void flush() {
    std::size_t done = 0;
    while (done < out_.size()) {
      const ssize_t n = ::send(fd_.get(), out_.data() + done, out_.size() - done, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        out_.clear();
        fail(ErrorCode::ClientDisconnect, "send failed: " + detail::errno_text());
      }
      done += static_cast<std::size_t>(n);
    }
    out_.clear();
  }

  /// True when a complete line is already buffered.
  bool line_buffered() const noexcept { return in_.find('\n', pos_) != std::string::npos; }

  enum class ReadStatus { Line, Closed, TimedOut };

  /// Reads one line without its newline. A negative timeout waits forever.
  ReadStatus read_line(std::string& line, Millis timeout = Millis(-1)) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
      const auto nl = in_.find('\n', pos_);
      if (nl != std::string::npos) {
        line.assign(in_, pos_, nl - pos_);
        pos_ = nl + 1;
        if (pos_ > (1 << 16)) {
          in_.erase(0, pos_);
          pos_ = 0;
        }
        return ReadStatus::Line;
      }
      int wait_ms = -1;
      if (timeout.count() >= 0) {
        const auto left = std::chrono::duration_cast<Millis>(deadline - std::chrono::steady_clock::now()).count();
        if (left <= 0 && timeout.count() > 0) return ReadStatus::TimedOut;
        wait_ms = static_cast<int>(std::max<long long>(0, left));
      }
      pollfd p{fd_.get(), POLLIN, 0};
      const int ready = ::poll(&p, 1, wait_ms);
      if (ready < 0) {
        if (errno == EINTR) continue;
        return ReadStatus::Closed;
      }
      if (ready == 0) return ReadStatus::TimedOut;
      char buf[1 << 16];
      const ssize_t n = ::recv(fd_.get(), buf, sizeof buf, 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) return ReadStatus::Closed;
      in_.append(buf, static_cast<std::size_t>(n));
    }
  }

 private:
  Fd fd_;
  std::string in_;
  std::size_t pos_ = 0;
  std::string out_;
};

class Listener {
 public:
  explicit Listener(const Address& a) {
    fd_ = Fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
    if (!fd_.valid()) fail(ErrorCode::IoFailure, "socket: " + detail::errno_text());
    const int one = 1;
    ::setsockopt(fd_.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in sa = detail::resolve(a);
    if (::bind(fd_.get(), reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0)
      fail(ErrorCode::IoFailure, "bind " + a.str() + ": " + detail::errno_text());
    if (::listen(fd_.get(), 4) != 0) fail(ErrorCode::IoFailure, "listen: " + detail::errno_text());
    socklen_t len = sizeof sa;
    ::getsockname(fd_.get(), reinterpret_cast<sockaddr*>(&sa), &len);
    address_ = {a.host, ntohs(sa.sin_port)};
  }

  /// Bound address; the port is the real one when 0 was requested.
  const Address& address() const noexcept { return address_; }

  Connection accept(std::chrono::milliseconds timeout = std::chrono::milliseconds(-1)) {
    pollfd p{fd_.get(), POLLIN, 0};
    int ready;
    do {
      ready = ::poll(&p, 1, static_cast<int>(timeout.count()));
    } while (ready < 0 && errno == EINTR);
    if (ready == 0) fail(ErrorCode::Timeout, "no client connected within " + std::to_string(timeout.count()) + " ms");
    const int c = ::accept4(fd_.get(), nullptr, nullptr, SOCK_CLOEXEC);
    if (c < 0) fail(ErrorCode::IoFailure, "accept: " + detail::errno_text());
    return Connection(Fd(c));
  }

 private:
  Fd fd_;
  Address address_;
};

inline Connection connect(const Address& a) {
  Fd fd(::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0));
  if (!fd.valid()) fail(ErrorCode::IoFailure, "socket: " + detail::errno_text());
  sockaddr_in sa = detail::resolve(a);
  if (::connect(fd.get(), reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0)
    fail(ErrorCode::ConnectionRefused, "cannot connect to " + a.str() + ": " + detail::errno_text());
  return Connection(std::move(fd));
}

}  // namespace wdvdb::net
