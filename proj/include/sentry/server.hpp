#pragma once

// Minimal stream server for the mediation protocol: one JSON object per
// line in, one per line out, per-connection ordering preserved. Listens
// on either a local TCP endpoint ("host:port") or a unix domain socket
// ("unix:/path").

#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sentry/pep.hpp"

namespace sentry {

struct Endpoint {
  enum class Kind { Tcp, Unix };

  Kind kind{Kind::Tcp};
  std::string host;  // Tcp
  int port{0};       // Tcp; 0 picks an ephemeral port
  std::string path;  // Unix

  // "unix:/some/path" or "host:port". Throws std::invalid_argument.
  static Endpoint parse(const std::string& text);
  std::string describe() const;
};

class LineServer {
 public:
  LineServer(PepService& service, Endpoint endpoint);
  ~LineServer();

  LineServer(const LineServer&) = delete;
  LineServer& operator=(const LineServer&) = delete;

  // Binds and starts the accept loop. Throws std::runtime_error on bind
  // failure. After start(), endpoint() reports the actual port.
  void start();
  void stop();

  const Endpoint& endpoint() const { return endpoint_; }

 private:
  void accept_loop();
  void serve_connection(int fd);

  PepService& service_;
  Endpoint endpoint_;
  int listen_fd_ = -1;
  std::atomic<bool> stopping_{false};
  std::thread accept_thread_;
  std::mutex workers_mu_;
  std::vector<std::thread> workers_;
};

// Blocking one-shot client used by the harness and tests.
class LineClient {
 public:
  explicit LineClient(const Endpoint& endpoint);  // throws on connect failure
  ~LineClient();

  LineClient(const LineClient&) = delete;
  LineClient& operator=(const LineClient&) = delete;

  // Sends one line (newline appended) and reads one response line.
  std::string round_trip(const std::string& line);

 private:
  int fd_ = -1;
  std::string buffer_;
};

}  // namespace sentry
