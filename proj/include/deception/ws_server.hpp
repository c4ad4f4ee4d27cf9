#pragma once

// WebSocket transport for LiveSession. Every connection gets its own
// isolated session; all I/O runs on one io_context thread, so each session's
// pad ingestion and frame emission are serialized.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include "deception/session.hpp"

namespace deception::server {

struct ServeOptions {
  std::uint16_t port = 8080;  // 0 picks a free port
  std::string address = "0.0.0.0";
  session::SessionConfig config;
  // Session logs are written here as <session_id>.jsonl.
  std::string log_dir = ".";
  std::function<void(std::string_view)> log = {};
};

class WebSocketServer {
 public:
  explicit WebSocketServer(ServeOptions options);
  ~WebSocketServer();
  WebSocketServer(const WebSocketServer&) = delete;
  WebSocketServer& operator=(const WebSocketServer&) = delete;

  // Bound port, valid once the constructor returns.
  std::uint16_t port() const;
  // Blocks until stop() is called.
  void run();
  // Safe to call from any thread.
  void stop();
  std::size_t sessions_started() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace deception::server
