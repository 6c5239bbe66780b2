// HTTP/JSON session API with a server-sent event stream per session.
#pragma once

#include <chrono>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "psg/engine.hpp"

namespace psg::server {

using Clock = std::chrono::steady_clock;

struct ServerOptions {
  std::string root = ".";    // directory of .psg.json documents
  std::string cors_origin;   // empty: no CORS headers
  std::chrono::seconds idle_timeout{30 * 60};
  std::function<Clock::time_point()> now = [] { return Clock::now(); };
  std::ostream* log = nullptr;  // one line per request
};

/// Session state as served by GET /sessions/{id}/state (without id and seq).
nlohmann::json snapshot_json(const EvalSession& s);

/// HTTP status for an engine precondition error.
int http_status(EngineError::Code c);

/// 32 hex digits from a cryptographic random source.
std::string random_session_id();

class SessionServer {
 public:
  explicit SessionServer(ServerOptions opts);
  ~SessionServer();
  SessionServer(const SessionServer&) = delete;
  SessionServer& operator=(const SessionServer&) = delete;

  /// Binds the listening socket; port 0 picks a free port.
  bool bind(const std::string& host, int port);
  int port() const;
  /// Serves until stop() is called.
  void run();
  void stop();

  std::size_t live_sessions() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace psg::server
