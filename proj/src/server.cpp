#include "sentry/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <stdexcept>

namespace sentry {

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error(what + ": " + std::strerror(errno));
}

bool send_all(int fd, const char* data, std::size_t len) {
  while (len > 0) {
    const ssize_t n = ::send(fd, data, len, 0);
    if (n <= 0) {
      if (n < 0 && errno == EINTR) continue;
      return false;
    }
    data += n;
    len -= static_cast<std::size_t>(n);
  }
  return true;
}

}  // namespace

Endpoint Endpoint::parse(const std::string& text) {
  Endpoint ep;
  if (text.rfind("unix:", 0) == 0) {
    ep.kind = Kind::Unix;
    ep.path = text.substr(5);
    if (ep.path.empty()) throw std::invalid_argument("empty unix socket path");
    return ep;
  }
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw std::invalid_argument("endpoint must be host:port or unix:/path");
  }
  ep.kind = Kind::Tcp;
  ep.host = text.substr(0, colon);
  const std::string port_str = text.substr(colon + 1);
  const auto [ptr, ec] =
      std::from_chars(port_str.data(), port_str.data() + port_str.size(), ep.port);
  if (ec != std::errc() || ptr != port_str.data() + port_str.size() ||
      ep.port < 0 || ep.port > 65535) {
    throw std::invalid_argument("invalid port '" + port_str + "'");
  }
  return ep;
}

std::string Endpoint::describe() const {
  if (kind == Kind::Unix) return "unix:" + path;
  return host + ":" + std::to_string(port);
}

LineServer::LineServer(PepService& service, Endpoint endpoint)
    : service_(service), endpoint_(std::move(endpoint)) {}

LineServer::~LineServer() { stop(); }

void LineServer::start() {
  if (endpoint_.kind == Endpoint::Kind::Unix) {
    listen_fd_ = ::socket(AF_UNIX, SOCK_STREAM, 0);
    if (listen_fd_ < 0) fail("socket");
    ::unlink(endpoint_.path.c_str());
    sockaddr_un addr{};
    addr.sun_family = AF_UNIX;
    if (endpoint_.path.size() >= sizeof(addr.sun_path)) {
      throw std::runtime_error("unix socket path too long");
    }
    std::strncpy(addr.sun_path, endpoint_.path.c_str(), sizeof(addr.sun_path) - 1);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
      fail("bind " + endpoint_.path);
    }
  } else {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) fail("socket");
    const int yes = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<uint16_t>(endpoint_.port));
    if (::inet_pton(AF_INET, endpoint_.host.c_str(), &addr.sin_addr) != 1) {
      throw std::runtime_error("cannot parse listen address " + endpoint_.host);
    }
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
      fail("bind " + endpoint_.describe());
    }
    if (endpoint_.port == 0) {
      sockaddr_in bound{};
      socklen_t len = sizeof(bound);
      if (::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len) == 0) {
        endpoint_.port = ntohs(bound.sin_port);
      }
    }
  }
  if (::listen(listen_fd_, 16) < 0) fail("listen");
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void LineServer::stop() {
  if (stopping_.exchange(true)) {
    if (accept_thread_.joinable()) accept_thread_.join();
    return;
  }
  if (listen_fd_ >= 0) {
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
  if (accept_thread_.joinable()) accept_thread_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(workers_mu_);
    workers.swap(workers_);
  }
  for (auto& w : workers) {
    if (w.joinable()) w.join();
  }
  if (endpoint_.kind == Endpoint::Kind::Unix) ::unlink(endpoint_.path.c_str());
}

void LineServer::accept_loop() {
  for (;;) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      return;  // listener closed
    }
    if (stopping_.load()) {
      ::close(fd);
      return;
    }
    std::lock_guard lock(workers_mu_);
    workers_.emplace_back([this, fd] { serve_connection(fd); });
  }
}

void LineServer::serve_connection(int fd) {
  std::string buffer;
  char chunk[4096];
  for (;;) {
    const std::size_t nl = buffer.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const std::string response = service_.handle_line(line) + "\n";
      if (!send_all(fd, response.data(), response.size())) break;
      continue;
    }
    const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
  ::close(fd);
}

LineClient::LineClient(const Endpoint& endpoint) {
  if (endpoint.kind == Endpoint::Kind::Unix) {
    fd_ = ::socket(AF_UNIX, SOCK_STREAM, 0);
    if (fd_ < 0) fail("socket");
    sockaddr_un addr{};
    addr.sun_family = AF_UNIX;
    std::strncpy(addr.sun_path, endpoint.path.c_str(), sizeof(addr.sun_path) - 1);
    if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
      ::close(fd_);
      fd_ = -1;
      fail("connect " + endpoint.describe());
    }
  } else {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) fail("socket");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<uint16_t>(endpoint.port));
    if (::inet_pton(AF_INET, endpoint.host.c_str(), &addr.sin_addr) != 1) {
      ::close(fd_);
      fd_ = -1;
      throw std::invalid_argument("cannot parse address " + endpoint.host);
    }
    if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
      ::close(fd_);
      fd_ = -1;
      fail("connect " + endpoint.describe());
    }
  }
}

LineClient::~LineClient() {
  if (fd_ >= 0) ::close(fd_);
}

std::string LineClient::round_trip(const std::string& line) {
  const std::string out = line + "\n";
  if (!send_all(fd_, out.data(), out.size())) {
    throw std::runtime_error("send failed");
  }
  char chunk[4096];
  for (;;) {
    const std::size_t nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string response = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return response;
    }
    const ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw std::runtime_error("connection closed mid-response");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

}  // namespace sentry
