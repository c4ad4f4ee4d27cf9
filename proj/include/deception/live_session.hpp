#pragma once

// Message-level driver for the live game protocol. Transport-agnostic: the
// caller feeds client messages and clock ticks and sends back whatever this
// returns, in order.
//
// server -> client
//   session_start  {scene, iterations, practice_rounds, pad_speed, frame_rate}
//   iteration_start {index, practice, duration}
//   frame          {seq, t, x, y}                 seq strictly increasing
//   iteration_end  {index, practice, true_target, accuracy, confidence}
//   session_end    {summary}
// client -> server
//   ready
//   pad    {t, value}      t measured from the client's receipt of iteration_start
//   rating {entertainment, deception, intelligence, trust}

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "deception/session.hpp"

namespace deception::session {

class LiveSession {
 public:
  using Warn = std::function<void(std::string_view)>;

  // Extra time after the last frame during which late pad samples are still
  // accepted before the iteration is scored.
  static constexpr double kGraceSeconds = 0.15;

  LiveSession(SessionConfig config, Warn warn = {});

  nlohmann::json open();

  // `now` is the server's monotonic clock in seconds. Unknown or malformed
  // messages are ignored with a warning.
  std::vector<nlohmann::json> handle(const nlohmann::json& message, double now);
  std::vector<nlohmann::json> handle_text(std::string_view text, double now);

  // Emits frames that are due and closes the iteration once it has ended.
  std::vector<nlohmann::json> tick(double now);

  bool iteration_running() const { return session_.phase() == Phase::running_iteration; }
  // Ratings received (or the session otherwise closed).
  bool finished() const { return session_.phase() == Phase::done; }
  const Session& session() const { return session_; }
  std::uint64_t frames_sent() const { return next_seq_; }
  std::size_t rejected_samples() const { return rejected_; }

  std::string log_text() const;

 private:
  void warn(std::string_view message) const;
  std::vector<nlohmann::json> start_iteration(double now);

  Session session_;
  Warn warn_;
  double iteration_start_ = 0.0;
  std::size_t next_frame_ = 0;
  std::uint64_t next_seq_ = 0;
  std::size_t rejected_ = 0;
};

}  // namespace deception::session
